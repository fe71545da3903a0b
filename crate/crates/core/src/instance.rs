//! An ISSP instance: a point set, a subset size `k`, and an indicator
//! configuration, plus the content hash that keys cached fitness tables.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::indicators::{Evaluator, IndicatorConfig, IndicatorKind, HV_MAX_POINTS};
use crate::pointset::PointSet;
use crate::subsetspace::{build_table, ComboSpace, FitnessTable, DEFAULT_TABLE_BUDGET};

#[derive(Debug, Clone)]
pub struct IsspInstance {
    pub points: PointSet,
    pub k: usize,
    pub config: IndicatorConfig,
}

impl IsspInstance {
    pub fn new(points: PointSet, k: usize, config: IndicatorConfig) -> Result<IsspInstance> {
        if k == 0 || k >= points.len() {
            return Err(Error::InvalidParameter(format!(
                "need 0 < k < n, got k={k}, n={}",
                points.len()
            )));
        }
        config.validate(points.d)?;
        Ok(IsspInstance { points, k, config })
    }

    /// Instance with the paper's indicator setup for the given kind.
    pub fn paper_default(points: PointSet, kind: IndicatorKind, k: usize) -> Result<IsspInstance> {
        let config = IndicatorConfig::paper_default(kind, &points)?;
        IsspInstance::new(points, k, config)
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn d(&self) -> usize {
        self.points.d
    }

    pub fn kind(&self) -> IndicatorKind {
        self.config.kind
    }

    pub fn space(&self) -> Result<ComboSpace> {
        ComboSpace::new(self.n(), self.k)
    }

    pub fn evaluator(&self) -> Result<Evaluator<'_>> {
        Evaluator::new(&self.points.points, &self.config)
    }

    /// SHA-256 over the full instance content: points, k, and every
    /// indicator parameter. Keys the fitness-table cache.
    pub fn content_hash(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"issp-instance/1");
        h.update(self.points.shape.as_str().as_bytes());
        h.update((self.points.d as u64).to_le_bytes());
        h.update((self.points.len() as u64).to_le_bytes());
        h.update(self.points.seed.to_le_bytes());
        for p in &self.points.points {
            for c in &p.coords {
                h.update(c.to_le_bytes());
            }
        }
        h.update((self.k as u64).to_le_bytes());
        h.update(self.config.kind.as_str().as_bytes());
        for c in &self.config.ref_point {
            h.update(c.to_le_bytes());
        }
        for c in &self.config.utopian {
            h.update(c.to_le_bytes());
        }
        h.update(self.config.energy_exponent.to_le_bytes());
        h.update((self.config.ref_set.len() as u64).to_le_bytes());
        for p in &self.config.ref_set {
            for c in &p.coords {
                h.update(c.to_le_bytes());
            }
        }
        h.update((self.config.weights.len() as u64).to_le_bytes());
        for w in &self.config.weights {
            for c in w {
                h.update(c.to_le_bytes());
            }
        }
        h.finalize().into()
    }

    pub fn hash_hex(&self) -> String {
        self.content_hash().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Builds the dense canonical fitness table for this instance.
    pub fn build_fitness_table(&self, budget: u64) -> Result<FitnessTable> {
        if self.config.kind == IndicatorKind::Hv && self.k > HV_MAX_POINTS {
            return Err(Error::Refused(format!(
                "hypervolume table needs subsets of size {} (limit {HV_MAX_POINTS})",
                self.k
            )));
        }
        let space = self.space()?;
        let evaluator = self.evaluator()?;
        build_table(
            &space,
            self.d(),
            self.config.kind,
            self.content_hash(),
            budget,
            |indices| {
                evaluator
                    .canonical(indices)
                    .expect("sizes checked before the build")
            },
        )
    }

    pub fn build_fitness_table_default_budget(&self) -> Result<FitnessTable> {
        self.build_fitness_table(DEFAULT_TABLE_BUDGET)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::{generate, Shape};

    #[test]
    fn hash_changes_with_content() {
        let points = generate(Shape::Linear, 10, 3, 1).unwrap();
        let a = IsspInstance::paper_default(points.clone(), IndicatorKind::Hv, 3).unwrap();
        let b = IsspInstance::paper_default(points.clone(), IndicatorKind::Igd, 3).unwrap();
        let c = IsspInstance::paper_default(points, IndicatorKind::Hv, 4).unwrap();
        assert_ne!(a.content_hash(), b.content_hash());
        assert_ne!(a.content_hash(), c.content_hash());
        assert_eq!(a.content_hash(), a.content_hash());
    }

    #[test]
    fn rejects_bad_k() {
        let points = generate(Shape::Linear, 10, 3, 1).unwrap();
        assert!(IsspInstance::paper_default(points.clone(), IndicatorKind::Se, 10).is_err());
        assert!(IsspInstance::paper_default(points, IndicatorKind::Se, 0).is_err());
    }

    #[test]
    fn table_spot_check_against_direct_evaluation() {
        use rand::{Rng, SeedableRng};
        let points = generate(Shape::Nonconvex, 12, 3, 2).unwrap();
        let inst = IsspInstance::paper_default(points, IndicatorKind::Igd, 4).unwrap();
        let table = inst.build_fitness_table_default_budget().unwrap();
        let space = inst.space().unwrap();
        assert_eq!(table.values.len() as u64, space.count());
        let ev = inst.evaluator().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let r = rng.gen_range(0..space.count());
            let subset = space.unrank(r).unwrap();
            let direct = ev.evaluate_indices(&subset.indices()).unwrap();
            assert_eq!(table.values[r as usize].to_bits(), direct.canonical.to_bits());
        }
    }

    #[test]
    fn epsilon_table_nonnegative_with_self_reference() {
        let points = generate(Shape::Convex, 10, 3, 3).unwrap();
        let inst = IsspInstance::paper_default(points, IndicatorKind::Epsilon, 3).unwrap();
        let table = inst.build_fitness_table_default_budget().unwrap();
        assert!(table.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn hv_table_refused_for_large_k() {
        let points = generate(Shape::Linear, 30, 3, 4).unwrap();
        let inst = IsspInstance::paper_default(points, IndicatorKind::Hv, 26).unwrap();
        assert!(matches!(
            inst.build_fitness_table_default_budget(),
            Err(Error::Refused(_))
        ));
    }
}
