//! Universal sets and universal function families.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("k = {k} exceeds the domain size {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("codomain must be non-empty")]
    EmptyCodomain,
    #[error("greedy construction would track {0} subset patterns, too many")]
    TooManyPatterns(u128),
    #[error("family cannot be materialized: {0} members")]
    TooLargeToList(u128),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum UniversalBackend {
    /// Exhaustive for small domains or `k >= n - 1`, greedy otherwise.
    #[default]
    Auto,
    /// All `2^n` subsets, enumerated lazily.
    Exhaustive,
    /// Seeded greedy cover of all (subset, pattern) pairs.
    Greedy { seed: u64 },
}

const GREEDY_PAIR_LIMIT: u128 = 4_000_000;
const GREEDY_CANDIDATES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Members {
    Exhaustive,
    Explicit(Vec<FixedBitSet>),
}

/// Family of subsets of `0..n` such that for every `k`-subset `S` every
/// pattern `P ⊆ S` equals `S ∩ U` for some member `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalSetFamily {
    n: usize,
    k: usize,
    members: Members,
}

impl UniversalSetFamily {
    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self.members, Members::Exhaustive)
    }

    /// Number of members, saturating.
    pub fn len(&self) -> u128 {
        match &self.members {
            Members::Exhaustive => 1u128.checked_shl(self.n as u32).unwrap_or(u128::MAX),
            Members::Explicit(list) => list.len() as u128,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Members of the given popcount in lexicographic order of their elements.
    fn members_of_weight(&self, weight: usize) -> Box<dyn Iterator<Item = FixedBitSet> + '_> {
        let n = self.n;
        match &self.members {
            Members::Exhaustive => Box::new((0..n).combinations(weight).map(move |combo| {
                let mut bits = FixedBitSet::with_capacity(n);
                for i in combo {
                    bits.insert(i);
                }
                bits
            })),
            Members::Explicit(list) => {
                Box::new(list.iter().filter(move |m| m.count_ones(..) == weight).cloned())
            }
        }
    }

    /// Visits members ordered by popcount, then lexicographically.
    pub fn for_each_member<F>(&self, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(&FixedBitSet) -> ControlFlow<()>,
    {
        for weight in 0..=self.n {
            for member in self.members_of_weight(weight) {
                f(&member)?;
            }
        }
        ControlFlow::Continue(())
    }

    pub fn members(&self) -> Result<Vec<FixedBitSet>, ColoringError> {
        if self.len() > 1 << 22 {
            return Err(ColoringError::TooLargeToList(self.len()));
        }
        let mut out = Vec::new();
        let _ = self.for_each_member(|m| {
            out.push(m.clone());
            ControlFlow::Continue(())
        });
        Ok(out)
    }

    /// One hexadecimal bitmask per member, bit `i` for element `i`.
    pub fn to_text(&self) -> Result<String, ColoringError> {
        let mut out = format!("# universal-set n={} k={}\n", self.n, self.k);
        for m in self.members()? {
            out.push_str(&member_hex(&m, self.n));
            out.push('\n');
        }
        Ok(out)
    }
}

fn member_hex(m: &FixedBitSet, n: usize) -> String {
    let digits = n.div_ceil(4).max(1);
    (0..digits)
        .rev()
        .map(|d| {
            let nibble = (0..4).filter(|b| m.contains(4 * d + b)).fold(0u32, |acc, b| acc | 1 << b);
            char::from_digit(nibble, 16).unwrap_or('0')
        })
        .collect()
}

pub fn universal_set(n: usize, k: usize) -> Result<UniversalSetFamily, ColoringError> {
    universal_set_with(n, k, UniversalBackend::Auto)
}

pub fn universal_set_with(
    n: usize,
    k: usize,
    backend: UniversalBackend,
) -> Result<UniversalSetFamily, ColoringError> {
    if k > n {
        return Err(ColoringError::KTooLarge { k, n });
    }
    let backend = match backend {
        UniversalBackend::Auto if n <= 12 || k + 1 >= n => UniversalBackend::Exhaustive,
        UniversalBackend::Auto if greedy_pairs(n, k) <= GREEDY_PAIR_LIMIT => {
            UniversalBackend::Greedy { seed: 0 }
        }
        UniversalBackend::Auto => UniversalBackend::Exhaustive,
        other => other,
    };
    let members = match backend {
        UniversalBackend::Greedy { seed } => Members::Explicit(greedy_members(n, k, seed)?),
        _ => Members::Exhaustive,
    };
    Ok(UniversalSetFamily { n, k, members })
}

fn greedy_pairs(n: usize, k: usize) -> u128 {
    let mut subsets: u128 = 1;
    for i in 0..k as u128 {
        subsets = subsets.saturating_mul(n as u128 - i) / (i + 1);
    }
    subsets.saturating_mul(1u128.checked_shl(k as u32).unwrap_or(u128::MAX))
}

fn greedy_members(n: usize, k: usize, seed: u64) -> Result<Vec<FixedBitSet>, ColoringError> {
    let pairs = greedy_pairs(n, k);
    if pairs > GREEDY_PAIR_LIMIT {
        return Err(ColoringError::TooManyPatterns(pairs));
    }
    let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let patterns = 1usize << k;
    let mut covered = vec![FixedBitSet::with_capacity(patterns); subsets.len()];
    let mut remaining = subsets.len() * patterns;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = Vec::new();
    let mut cursor = 0usize;
    let pattern_of = |bits: &FixedBitSet, subset: &[usize]| {
        subset.iter().enumerate().fold(0usize, |acc, (j, &x)| acc | (usize::from(bits.contains(x)) << j))
    };
    while remaining > 0 {
        while covered[cursor / patterns].contains(cursor % patterns) {
            cursor += 1;
        }
        let (target, pattern) = (cursor / patterns, cursor % patterns);
        let mut best: Option<(usize, FixedBitSet)> = None;
        for _ in 0..GREEDY_CANDIDATES {
            let mut bits = FixedBitSet::with_capacity(n);
            for i in 0..n {
                bits.set(i, rng.gen_bool(0.5));
            }
            for (j, &x) in subsets[target].iter().enumerate() {
                bits.set(x, pattern >> j & 1 == 1);
            }
            let gain = subsets
                .iter()
                .enumerate()
                .filter(|(i, s)| !covered[*i].contains(pattern_of(&bits, s)))
                .count();
            if best.as_ref().map_or(true, |(g, _)| gain > *g) {
                best = Some((gain, bits));
            }
        }
        let (_, bits) = best.expect("at least one candidate");
        for (i, s) in subsets.iter().enumerate() {
            let p = pattern_of(&bits, s);
            if !covered[i].contains(p) {
                covered[i].insert(p);
                remaining -= 1;
            }
        }
        members.push(bits);
    }
    members.sort_by_key(|m| (m.count_ones(..), m.ones().collect::<Vec<_>>()));
    members.dedup();
    Ok(members)
}

/// A `k`-subset together with a pattern on it that no member realizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalityGap {
    pub subset: Vec<usize>,
    pub pattern: Vec<usize>,
}

/// Exhaustive check of the universality property.
pub fn verify_universal_set(fam: &UniversalSetFamily) -> Result<(), UniversalityGap> {
    if fam.is_exhaustive() {
        return Ok(());
    }
    let members = fam.members().expect("explicit families are listable");
    for subset in (0..fam.n).combinations(fam.k) {
        let mut seen = FixedBitSet::with_capacity(1 << fam.k);
        for m in &members {
            let p = subset
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &x)| acc | (usize::from(m.contains(x)) << j));
            seen.insert(p);
        }
        if let Some(missing) = (0..1usize << fam.k).find(|&p| !seen.contains(p)) {
            let pattern = subset.iter().enumerate().filter(|(j, _)| missing >> j & 1 == 1).map(|(_, &x)| x).collect();
            return Err(UniversalityGap { subset, pattern });
        }
    }
    Ok(())
}

/// Family of functions `0..n -> 0..q` such that every function on every
/// `k`-subset is the restriction of a member. Each member is the product of
/// `q' = ⌈log2 q⌉` universal sets: element `x` gets index
/// `Σ_j [x ∈ U_j]·2^(j-1)`, which is mapped to `min(index, q - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalFunctionFamily {
    n: usize,
    k: usize,
    q: usize,
    arity: usize,
    set: UniversalSetFamily,
}

pub fn universal_function_family(
    n: usize,
    q: usize,
    k: usize,
) -> Result<UniversalFunctionFamily, ColoringError> {
    universal_function_family_with(n, q, k, UniversalBackend::Auto)
}

pub fn universal_function_family_with(
    n: usize,
    q: usize,
    k: usize,
    backend: UniversalBackend,
) -> Result<UniversalFunctionFamily, ColoringError> {
    if q == 0 {
        return Err(ColoringError::EmptyCodomain);
    }
    let set = universal_set_with(n, k, backend)?;
    let arity = usize::BITS as usize - (q - 1).leading_zeros() as usize;
    Ok(UniversalFunctionFamily { n, k, q, arity, set })
}

impl UniversalFunctionFamily {
    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn codomain_size(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of universal sets combined per member.
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn set_family(&self) -> &UniversalSetFamily {
        &self.set
    }

    /// Number of members, saturating.
    pub fn len(&self) -> u128 {
        (0..self.arity).fold(1u128, |acc, _| acc.saturating_mul(self.set.len()))
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visits members as value vectors. Tuples `(U_1, .., U_q')` are ordered
    /// by their total popcount, then lexicographically by the popcounts of
    /// the components, then by the components themselves.
    pub fn for_each<F>(&self, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(&[u8]) -> ControlFlow<()>,
    {
        if self.arity == 0 {
            return f(&vec![0u8; self.n]);
        }
        let mut values = vec![0u8; self.n];
        for total in 0..=self.arity * self.n {
            let mut weights = vec![0usize; self.arity];
            let mut tuple: Vec<FixedBitSet> = Vec::with_capacity(self.arity);
            self.visit_weights(total, 0, &mut weights, &mut tuple, &mut values, &mut f)?;
        }
        ControlFlow::Continue(())
    }

    fn visit_weights<F>(
        &self,
        remaining: usize,
        position: usize,
        weights: &mut [usize],
        tuple: &mut Vec<FixedBitSet>,
        values: &mut [u8],
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[u8]) -> ControlFlow<()>,
    {
        if position + 1 == self.arity {
            if remaining > self.n {
                return ControlFlow::Continue(());
            }
            weights[position] = remaining;
            return self.visit_members(0, weights, tuple, values, f);
        }
        for w in 0..=remaining.min(self.n) {
            weights[position] = w;
            self.visit_weights(remaining - w, position + 1, weights, tuple, values, f)?;
        }
        ControlFlow::Continue(())
    }

    fn visit_members<F>(
        &self,
        position: usize,
        weights: &[usize],
        tuple: &mut Vec<FixedBitSet>,
        values: &mut [u8],
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[u8]) -> ControlFlow<()>,
    {
        if position == self.arity {
            for (x, value) in values.iter_mut().enumerate() {
                let index = tuple
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (j, u)| acc | (usize::from(u.contains(x)) << j));
                *value = index.min(self.q - 1) as u8;
            }
            return f(values);
        }
        for member in self.set.members_of_weight(weights[position]) {
            tuple.push(member);
            let flow = self.visit_members(position + 1, weights, tuple, values, f);
            tuple.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    pub fn members(&self) -> Result<Vec<Vec<u8>>, ColoringError> {
        if self.len() > 1 << 22 {
            return Err(ColoringError::TooLargeToList(self.len()));
        }
        let mut out = Vec::new();
        let _ = self.for_each(|m| {
            out.push(m.to_vec());
            ControlFlow::Continue(())
        });
        Ok(out)
    }
}

/// A `k`-subset with an assignment that no member of the family extends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionGap {
    pub subset: Vec<usize>,
    pub values: Vec<u8>,
}

/// Exhaustive check: every function from every `k`-subset to `0..q` is the
/// restriction of some member.
pub fn verify_function_family(fam: &UniversalFunctionFamily) -> Result<(), FunctionGap> {
    let members = fam.members().expect("small families are listable");
    let q = fam.q;
    for subset in (0..fam.n).combinations(fam.k) {
        let total = q.pow(subset.len() as u32);
        let mut seen = FixedBitSet::with_capacity(total);
        for m in &members {
            let code = subset.iter().rev().fold(0usize, |acc, &x| acc * q + m[x] as usize);
            seen.insert(code);
        }
        if let Some(missing) = (0..total).find(|&c| !seen.contains(c)) {
            let values = (0..subset.len()).map(|j| ((missing / q.pow(j as u32)) % q) as u8).collect();
            return Err(FunctionGap { subset, values });
        }
    }
    Ok(())
}

/// Two-class vertex coloring used to search for odd cycle cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BiColor {
    /// Candidate bipartite vertex.
    B,
    /// Candidate head vertex.
    C,
}

/// Members of the set get `C`, everything else `B`.
pub fn occ_coloring_from_set(n: usize, member: &VertexSet) -> Vec<BiColor> {
    (0..n).map(|v: Vertex| if member.contains(&v) { BiColor::C } else { BiColor::B }).collect()
}
