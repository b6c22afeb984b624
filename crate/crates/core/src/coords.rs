//! Named coordinate systems.
//!
//! The product-manifold pipeline works in `(z, r, th, x1, y1, ..)`; the
//! Cartesian chart replaces `(r, th)` by `(u, v)`; the rotation-reduced
//! dynamics live in `(z, r, rho)`. The generic engine accepts any custom
//! list of distinct names.

use std::fmt;
use std::sync::Arc;

use crate::error::Error;

#[derive(Debug, PartialEq, Eq)]
pub struct CoordSystem {
    names: Vec<String>,
}

impl CoordSystem {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>, Error> {
        if names.is_empty() {
            return Err(Error::Invalid("empty coordinate list".into()));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() || !a.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(Error::Invalid(format!("bad coordinate name `{}`", a)));
            }
            if a == "e" {
                return Err(Error::Invalid("`e` is reserved for the parameter".into()));
            }
            if names[..i].contains(a) {
                return Err(Error::Invalid(format!("duplicate coordinate `{}`", a)));
            }
        }
        Ok(Arc::new(CoordSystem { names }))
    }

    /// `(z, r, th, x1, y1, .., x_{n-1}, y_{n-1})` with `2n+1` coordinates.
    pub fn jet(n: usize) -> Arc<Self> {
        let mut names = vec!["z".to_string(), "r".to_string(), "th".to_string()];
        for i in 1..n {
            names.push(format!("x{}", i));
            names.push(format!("y{}", i));
        }
        Arc::new(CoordSystem { names })
    }

    /// Cartesian chart on the 3-manifold factor: `(z, u, v, x1, y1, ..)`.
    pub fn cartesian_jet(n: usize) -> Arc<Self> {
        let mut names = vec!["z".to_string(), "u".to_string(), "v".to_string()];
        for i in 1..n {
            names.push(format!("x{}", i));
            names.push(format!("y{}", i));
        }
        Arc::new(CoordSystem { names })
    }

    /// Quotient coordinates `(z, r, rho)` of the quarter-sphere.
    pub fn reduced() -> Arc<Self> {
        Arc::new(CoordSystem {
            names: vec!["z".into(), "r".into(), "rho".into()],
        })
    }

    /// Two-variable chart systems used by the planar dynamics.
    pub fn plane(a: &str, b: &str) -> Arc<Self> {
        Arc::new(CoordSystem {
            names: vec![a.to_string(), b.to_string()],
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn theta_index(&self) -> Option<usize> {
        self.index_of("th")
    }

    pub fn same(a: &Arc<CoordSystem>, b: &Arc<CoordSystem>) -> bool {
        Arc::ptr_eq(a, b) || a.names == b.names
    }

    pub fn check_same(a: &Arc<CoordSystem>, b: &Arc<CoordSystem>) -> Result<(), Error> {
        if Self::same(a, b) {
            Ok(())
        } else {
            Err(Error::CoordMismatch(a.to_string(), b.to_string()))
        }
    }
}

impl fmt::Display for CoordSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_layout() {
        let c = CoordSystem::jet(2);
        assert_eq!(c.len(), 5);
        assert_eq!(c.names(), &["z", "r", "th", "x1", "y1"]);
        assert_eq!(c.theta_index(), Some(2));
        let c3 = CoordSystem::jet(3);
        assert_eq!(c3.len(), 7);
        assert_eq!(c3.name(6), "y2");
    }

    #[test]
    fn rejects_bad_names() {
        assert!(CoordSystem::new(&["z", "z"]).is_err());
        assert!(CoordSystem::new(&["e", "r"]).is_err());
        assert!(CoordSystem::new(&["1x"]).is_err());
        let ok = CoordSystem::new(&["z", "x1", "y1"]).unwrap();
        assert_eq!(ok.len(), 3);
        assert_eq!(ok.theta_index(), None);
    }
}
