//! Density schedules `p(n)` and the constraint they induce at each size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, ConstraintSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    DegreeSequence,
    EdgeCount,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DensitySchedule {
    /// `p(n) = p`
    Constant { p: f64 },
    /// `p(n) = 1 - n^{-1/2}`
    UltraDense,
    /// `p(n) = d / (n - 1)`
    FixedDegree { d: usize },
}

impl DensitySchedule {
    pub fn nominal_p(&self, n: usize) -> f64 {
        match *self {
            DensitySchedule::Constant { p } => p,
            DensitySchedule::UltraDense => 1.0 - 1.0 / (n as f64).sqrt(),
            DensitySchedule::FixedDegree { d } => d as f64 / (n as f64 - 1.0),
        }
    }
}

/// Constraint family: a constraint kind plus how its density scales with `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecFamily {
    pub kind: FamilyKind,
    pub schedule: DensitySchedule,
}

/// The constraint at one size, with the canonical `p` it matches exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduledSpec {
    pub n: usize,
    pub spec: ConstraintSpec,
    pub nominal_p: f64,
    pub p: f64,
    /// `d` for the degree family, `L` for the edge-count family.
    pub target: usize,
}

impl SpecFamily {
    pub fn new(kind: FamilyKind, schedule: DensitySchedule) -> Self {
        SpecFamily { kind, schedule }
    }

    pub fn validate(&self) -> Result<()> {
        if let DensitySchedule::Constant { p } = self.schedule {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConstraint(format!("density {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Degree family: `d = round(p (n-1))`, lowered by one when `n d` is odd,
    /// and `p = d/(n-1)`. Edge family: `L = round(p n(n-1)/2)`, `p = L / (n(n-1)/2)`.
    pub fn at(&self, n: usize) -> Result<ScheduledSpec> {
        self.validate()?;
        if n < 2 {
            return Err(Error::OutOfRange(format!("schedules need n >= 2, got {n}")));
        }
        let nominal_p = self.schedule.nominal_p(n);
        if !(0.0..=1.0).contains(&nominal_p) {
            return Err(Error::InvalidConstraint(format!("density {nominal_p} at n = {n} outside [0, 1]")));
        }
        let out = match self.kind {
            FamilyKind::DegreeSequence => {
                let mut d = (nominal_p * (n - 1) as f64).round() as usize;
                if (n * d) % 2 == 1 {
                    d -= 1;
                }
                ScheduledSpec {
                    n,
                    spec: ConstraintSpec::constant_degree(n, d),
                    nominal_p,
                    p: d as f64 / (n - 1) as f64,
                    target: d,
                }
            }
            FamilyKind::EdgeCount => {
                let m = pair_count(n);
                let l = (nominal_p * m as f64).round() as usize;
                ScheduledSpec {
                    n,
                    spec: ConstraintSpec::edge_count(n, l),
                    nominal_p,
                    p: l as f64 / m as f64,
                    target: l,
                }
            }
        };
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_graphical;

    #[test]
    fn degree_rounding_keeps_sum_even() {
        let fam = SpecFamily::new(FamilyKind::DegreeSequence, DensitySchedule::Constant { p: 0.5 });
        let s = fam.at(800).unwrap();
        // round(0.5 * 799) = 400, 800 * 400 even
        assert_eq!(s.target, 400);
        assert_eq!(s.p, 400.0 / 799.0);
        let s = fam.at(201).unwrap();
        // round(100) = 100, 201 * 100 even
        assert_eq!(s.target, 100);
        let s = fam.at(5).unwrap();
        assert_eq!(s.target, 2);
        for n in 2..60 {
            assert!(is_graphical(&fam.at(n).unwrap().spec), "n = {n}");
        }
        let fam = SpecFamily::new(FamilyKind::DegreeSequence, DensitySchedule::Constant { p: 0.2 });
        for n in 2..60 {
            let s = fam.at(n).unwrap();
            assert_eq!((n * s.target) % 2, 0);
            assert!(is_graphical(&s.spec));
        }
    }

    #[test]
    fn odd_product_decrements() {
        // n = 7, p = 0.5: round(3) = 3, 21 odd -> 2
        let fam = SpecFamily::new(FamilyKind::DegreeSequence, DensitySchedule::Constant { p: 0.5 });
        assert_eq!(fam.at(7).unwrap().target, 2);
    }

    #[test]
    fn edge_rounding() {
        let fam = SpecFamily::new(FamilyKind::EdgeCount, DensitySchedule::Constant { p: 0.5 });
        let s = fam.at(4).unwrap();
        assert_eq!(s.target, 3);
        assert_eq!(s.p, 0.5);
        let s = fam.at(800).unwrap();
        assert_eq!(s.target, 159_800);
    }

    #[test]
    fn ultra_dense_and_fixed_degree() {
        let fam = SpecFamily::new(FamilyKind::DegreeSequence, DensitySchedule::UltraDense);
        let s = fam.at(100).unwrap();
        assert!((s.nominal_p - 0.9).abs() < 1e-15);
        assert_eq!(s.target, 89);
        assert!(is_graphical(&s.spec));
        let fam = SpecFamily::new(FamilyKind::DegreeSequence, DensitySchedule::FixedDegree { d: 3 });
        assert_eq!(fam.at(10).unwrap().target, 3);
    }

    #[test]
    fn rejects_bad_density() {
        let fam = SpecFamily::new(FamilyKind::EdgeCount, DensitySchedule::Constant { p: 1.5 });
        assert!(fam.at(10).is_err());
    }

    #[test]
    fn schedule_json() {
        let fam: SpecFamily =
            serde_json::from_str(r#"{"kind":"degree_sequence","schedule":{"type":"constant","p":0.5}}"#).unwrap();
        assert_eq!(fam.kind, FamilyKind::DegreeSequence);
    }
}
