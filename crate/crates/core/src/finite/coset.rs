//! Left-coset space `G/B` for an Eichler-type base subgroup `B`, together
//! with the element-to-coset lookup the operator constructions run on.

use super::{eichler_members, EichlerPair, GroupElement, ModelParams};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// The permutation module basis: one representative per left coset `gB`.
///
/// A coset is keyed by its lexicographically smallest member on the tuple
/// `(a,b,c,d)` of canonical residues; since the ambient group enumeration is
/// lexicographic, scanning it and marking whole cosets yields exactly those
/// keys, in increasing order.
#[derive(Debug, Clone)]
pub struct CosetSpace {
    params: ModelParams,
    base: EichlerPair,
    group: Vec<GroupElement>,
    reps: Vec<GroupElement>,
    lookup: BTreeMap<u128, u32>,
    /// coset index of group[k], aligned with the sorted group list
    coset_of: Vec<u32>,
    packed: Vec<u128>,
}

impl CosetSpace {
    pub fn build(
        params: &ModelParams,
        group: &[GroupElement],
        base: EichlerPair,
    ) -> Result<CosetSpace> {
        let expected = base.index(params);
        if expected > u32::MAX as u128 {
            return Err(Error::SizeBudget {
                what: "coset space",
                size: expected,
                limit: u32::MAX as u128,
            });
        }
        let members = eichler_members(params, group, &base);
        let packed: Vec<u128> = group.iter().map(|g| g.pack()).collect();
        debug_assert!(packed.windows(2).all(|w| w[0] < w[1]));

        let mut coset_of = vec![u32::MAX; group.len()];
        let mut reps = Vec::with_capacity(expected as usize);
        let mut lookup = BTreeMap::new();
        for (k, g) in group.iter().enumerate() {
            if coset_of[k] != u32::MAX {
                continue;
            }
            let idx = reps.len() as u32;
            // first unassigned element in scan order is the lex-smallest member
            reps.push(*g);
            lookup.insert(g.pack(), idx);
            for h in &members {
                let gh = g.mul(h, params);
                let pos = packed.binary_search(&gh.pack()).expect("closed under mult");
                coset_of[pos] = idx;
            }
        }
        assert_eq!(reps.len() as u128, expected, "coset count != |G|/|B|");
        Ok(CosetSpace {
            params: *params,
            base,
            group: group.to_vec(),
            reps,
            lookup,
            coset_of,
            packed,
        })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn base(&self) -> EichlerPair {
        self.base
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn reps(&self) -> &[GroupElement] {
        &self.reps
    }

    /// Map from canonical coset key (lex-smallest member) to index.
    pub fn lookup(&self) -> &BTreeMap<u128, u32> {
        &self.lookup
    }

    /// Coset index of an arbitrary group element.
    pub fn coset_index(&self, g: &GroupElement) -> u32 {
        let pos = self
            .packed
            .binary_search(&g.pack())
            .expect("element outside the enumerated group");
        self.coset_of[pos]
    }

    /// The ambient group, in enumeration order.
    pub fn group(&self) -> &[GroupElement] {
        &self.group
    }

    /// Partition of the cosets into the fibers of `G/B -> G/H` for a
    /// subgroup `H ⊇ B` given by its member list: returns one fiber id per
    /// coset and the number of fibers.  All fibers have size `|H| / |B|`.
    pub fn fibers(&self, members: &[GroupElement]) -> (Vec<u32>, u32) {
        let mut elem_fiber = vec![u32::MAX; self.group.len()];
        let mut next = 0u32;
        for (k, g) in self.group.iter().enumerate() {
            if elem_fiber[k] != u32::MAX {
                continue;
            }
            for h in members {
                let gh = g.mul(h, &self.params);
                let pos = self
                    .packed
                    .binary_search(&gh.pack())
                    .expect("closed under mult");
                elem_fiber[pos] = next;
            }
            next += 1;
        }
        let fiber_of_coset = self
            .reps
            .iter()
            .map(|r| {
                let pos = self.packed.binary_search(&r.pack()).unwrap();
                elem_fiber[pos]
            })
            .collect();
        (fiber_of_coset, next)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{enumerate_group, segment_embed};
    use super::*;
    use crate::seg::Segment;

    #[test]
    fn coset_counts() {
        let params = ModelParams::new(2, 3).unwrap();
        let group = enumerate_group(&params);
        let cs = CosetSpace::build(&params, &group, EichlerPair::new(1, 2, &params).unwrap())
            .unwrap();
        assert_eq!(cs.dim(), 12);

        let params = ModelParams::new(3, 3).unwrap();
        let group = enumerate_group(&params);
        let cs = CosetSpace::build(&params, &group, EichlerPair::new(0, 3, &params).unwrap())
            .unwrap();
        assert_eq!(cs.dim(), 36);

        let params = ModelParams::new(2, 1).unwrap();
        let group = enumerate_group(&params);
        let cs = CosetSpace::build(&params, &group, EichlerPair::new(0, 0, &params).unwrap())
            .unwrap();
        assert_eq!(cs.dim(), 1);
    }

    #[test]
    fn every_element_lands_in_exactly_one_coset() {
        let params = ModelParams::new(2, 2).unwrap();
        let group = enumerate_group(&params);
        let base = segment_embed(&Segment::new(0, 2).unwrap(), 1, &params).unwrap();
        let cs = CosetSpace::build(&params, &group, base).unwrap();
        let members = eichler_members(&params, &group, &base);
        // g and gb share a coset; distinct reps have distinct cosets
        for g in group.iter().step_by(7) {
            let idx = cs.coset_index(g);
            for b in &members {
                assert_eq!(cs.coset_index(&g.mul(b, &params)), idx);
            }
        }
        let mut counts = vec![0usize; cs.dim()];
        for g in &group {
            counts[cs.coset_index(g) as usize] += 1;
        }
        assert!(counts.iter().all(|&c| c as u128 == base.order(&params)));
    }

    #[test]
    fn fibers_partition_into_equal_blocks() {
        let params = ModelParams::new(2, 3).unwrap();
        let group = enumerate_group(&params);
        let base = EichlerPair::new(1, 2, &params).unwrap();
        let cs = CosetSpace::build(&params, &group, base).unwrap();
        let h = EichlerPair::new(1, 1, &params).unwrap();
        let members = eichler_members(&params, &group, &h);
        let (fiber_of, count) = cs.fibers(&members);
        assert_eq!(count as u128, h.index(&params));
        let block = (h.order(&params) / base.order(&params)) as usize;
        for f in 0..count {
            assert_eq!(
                fiber_of.iter().filter(|&&x| x == f).count(),
                block,
                "fiber {f}"
            );
        }
        // base itself: every coset its own fiber
        let (_, count) = cs.fibers(&eichler_members(&params, &group, &base));
        assert_eq!(count as usize, cs.dim());
    }
}
