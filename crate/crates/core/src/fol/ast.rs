use std::collections::BTreeSet;
use std::fmt;

/// Typed first-order formula. Quantified variables name the data partition
/// they range over.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom { predicate: String, args: Vec<String> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ForAll { var: String, body: Box<Formula> },
    Exists { var: String, body: Box<Formula> },
}

impl Formula {
    pub fn atom(predicate: &str, args: &[&str]) -> Self {
        Formula::Atom {
            predicate: predicate.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(var: &str, body: Formula) -> Self {
        Formula::ForAll { var: var.to_string(), body: Box::new(body) }
    }

    pub fn exists(var: &str, body: Formula) -> Self {
        Formula::Exists { var: var.to_string(), body: Box::new(body) }
    }

    /// Variables occurring in atoms without an enclosing quantifier.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut free = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut free);
        free
    }

    /// Every atom as `(predicate, args)`, in left-to-right order.
    pub fn atoms(&self) -> Vec<(&str, &[String])> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |p, a| out.push((p, a)));
        out
    }

    fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a str, &'a [String])) {
        match self {
            Formula::Atom { predicate, args } => f(predicate, args),
            Formula::Not(a) => a.visit_atoms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Formula::ForAll { body, .. } | Formula::Exists { body, .. } => body.visit_atoms(f),
        }
    }

    /// Quantified variables, outermost first.
    pub fn quantified_variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a str>) {
            match f {
                Formula::Atom { .. } => {}
                Formula::Not(a) => walk(a, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::ForAll { var, body } | Formula::Exists { var, body } => {
                    out.push(var);
                    walk(body, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::ForAll { .. } | Formula::Exists { .. } => 0,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            Formula::Atom { .. } => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::Atom { predicate, args } => write!(f, "{}({})", predicate, args.join(", "))?,
            Formula::Not(a) => {
                f.write_str("not ")?;
                a.write_prec(f, 4)?;
            }
            Formula::And(a, b) => {
                a.write_prec(f, 3)?;
                f.write_str(" and ")?;
                b.write_prec(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.write_prec(f, 2)?;
                f.write_str(" or ")?;
                b.write_prec(f, 3)?;
            }
            // right associative
            Formula::Implies(a, b) => {
                a.write_prec(f, 2)?;
                f.write_str(" => ")?;
                b.write_prec(f, 1)?;
            }
            Formula::ForAll { var, body } => {
                write!(f, "forall {var}: ")?;
                body.write_prec(f, 0)?;
            }
            Formula::Exists { var, body } => {
                write!(f, "exists {var}: ")?;
                body.write_prec(f, 0)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn collect_free<'a>(f: &'a Formula, bound: &mut Vec<&'a str>, free: &mut BTreeSet<String>) {
    match f {
        Formula::Atom { args, .. } => {
            for a in args {
                if !bound.contains(&a.as_str()) {
                    free.insert(a.clone());
                }
            }
        }
        Formula::Not(a) => collect_free(a, bound, free),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_free(a, bound, free);
            collect_free(b, bound, free);
        }
        Formula::ForAll { var, body } | Formula::Exists { var, body } => {
            bound.push(var);
            collect_free(body, bound, free);
            bound.pop();
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}
