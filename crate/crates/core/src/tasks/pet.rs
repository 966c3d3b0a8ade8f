use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::autodiff::DenseNetwork;
use crate::curriculum::Curriculum;
use crate::fol::{parse_kb, GroundingTable};

use super::{query_set, shipped_curricula, TaskBundle, TaskError, TaskKind, DATA_STREAM, DEFAULT_HIDDEN};

/// Rule file of the penguin exception task.
pub const PET_KB: &str = include_str!("../../data/pet.kb");

const CURRICULA: [(&str, &str); 3] = [
    ("baseline", include_str!("../../data/pet_baseline.curriculum")),
    ("kc", include_str!("../../data/pet_kc.curriculum")),
    ("ts", include_str!("../../data/pet_ts.curriculum")),
];

const QUERIES: [(&str, &str); 4] = [
    ("is_bird(Normal_Birds)", "forall Norm_Birds: is_bird(Norm_Birds)"),
    ("is_bird(Penguins)", "forall Penguins: is_bird(Penguins)"),
    ("can_fly(Normal_Birds)", "forall Norm_Birds: can_fly(Norm_Birds)"),
    ("not(can_fly(Penguins))", "forall Penguins: not can_fly(Penguins)"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct PetConfig {
    pub n_norm_birds: usize,
    pub n_cows: usize,
    pub n_penguins: usize,
    /// At least 3: each group's mean sits on its own axis.
    pub feature_dim: usize,
    pub cluster_std: f64,
    /// Distance of each cluster centre from the origin, in units of
    /// `cluster_std`.
    pub center_offset: f64,
    pub hidden: Vec<usize>,
    pub seed: u64,
}

impl Default for PetConfig {
    fn default() -> Self {
        Self {
            n_norm_birds: 100,
            n_cows: 100,
            n_penguins: 50,
            feature_dim: 4,
            cluster_std: 0.3,
            center_offset: 4.5,
            hidden: DEFAULT_HIDDEN.to_vec(),
            seed: 0,
        }
    }
}

impl PetConfig {
    pub fn validate(&self) -> Result<(), TaskError> {
        if self.n_norm_birds == 0 || self.n_cows == 0 || self.n_penguins == 0 {
            return Err(TaskError::Config("every animal group needs at least one member".into()));
        }
        if self.feature_dim < 3 {
            return Err(TaskError::Config(format!("feature_dim must be >= 3, got {}", self.feature_dim)));
        }
        if !(self.cluster_std > 0.0 && self.cluster_std.is_finite()) {
            return Err(TaskError::Config(format!("cluster_std must be positive, got {}", self.cluster_std)));
        }
        // centres on distinct axes are offset·√2·std apart
        if !(self.center_offset * std::f64::consts::SQRT_2 >= 4.0) {
            return Err(TaskError::Config(format!(
                "center_offset {} puts cluster centres closer than 4 standard deviations",
                self.center_offset
            )));
        }
        Ok(())
    }

    /// Cluster centres: group `g` sits at `center_offset·std` along axis `g`.
    pub fn means(&self) -> [Vec<f64>; 3] {
        std::array::from_fn(|g| {
            let mut m = vec![0.0; self.feature_dim];
            m[g] = self.center_offset * self.cluster_std;
            m
        })
    }
}

/// Normal birds, cows and penguins as three Gaussian clusters in one
/// `animals` domain (rows in that order).
pub fn build_pet(cfg: &PetConfig) -> Result<TaskBundle, TaskError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(DATA_STREAM);
    let noise = Normal::new(0.0, cfg.cluster_std).expect("std validated");
    let counts = [cfg.n_norm_birds, cfg.n_cows, cfg.n_penguins];
    let mut rows = Vec::with_capacity(counts.iter().sum());
    for (mean, &n) in cfg.means().iter().zip(&counts) {
        for _ in 0..n {
            rows.push(mean.iter().map(|&m| m + noise.sample(&mut rng)).collect());
        }
    }

    let mut g = GroundingTable::new();
    g.add_domain("animals", rows, false)?;
    let birds_end = cfg.n_norm_birds;
    let cows_end = birds_end + cfg.n_cows;
    let total = cows_end + cfg.n_penguins;
    g.add_partition("Norm_Birds", "animals", (0..birds_end).collect())?;
    g.add_partition("Cows", "animals", (birds_end..cows_end).collect())?;
    g.add_partition("Penguins", "animals", (cows_end..total).collect())?;
    g.add_union("Non_Penguins", &["Norm_Birds", "Cows"])?;
    g.add_union("Animals", &["Norm_Birds", "Cows", "Penguins"])?;
    for name in ["is_bird", "can_fly", "is_penguin"] {
        let net = DenseNetwork::zeros(cfg.feature_dim, &cfg.hidden).map_err(|e| TaskError::Config(e.to_string()))?;
        g.add_predicate(name, 1, net);
    }

    let kb = parse_kb(PET_KB)?.with_groundings(g);
    let bundle = TaskBundle {
        kind: TaskKind::Pet,
        kb,
        curricula: pet_curricula(),
        queries: query_set(&QUERIES),
    };
    bundle.validate()?;
    Ok(bundle)
}

/// The fixed curricula: `baseline`, `kc` and `ts`.
pub fn pet_curricula() -> BTreeMap<String, Curriculum> {
    shipped_curricula(&CURRICULA)
}
