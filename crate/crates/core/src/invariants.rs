//! Subgroups as induced generating sequences, the standard characteristic
//! series, conjugacy classes, the agemo series and the Hall order type.

use std::collections::BTreeMap;
use std::fmt;

use crate::pcgroup::{DenseGroup, ExponentVector, PcError, PcGroup, DEFAULT_BUDGET, MAX_GENS};

/// A subgroup of a pc group given by an induced generating sequence.
///
/// The member stored at slot `d` has depth `d`: its highest nonzero
/// exponent sits at index `d` and equals 1. Every element of the subgroup is
/// uniquely a product of powers of the members taken in increasing depth.
#[derive(Clone)]
pub struct Subgroup<'a> {
    parent: &'a PcGroup,
    slots: [Option<ExponentVector>; MAX_GENS],
}

impl fmt::Debug for Subgroup<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.igs()).finish()
    }
}

impl PartialEq for Subgroup<'_> {
    fn eq(&self, other: &Self) -> bool {
        // a normalized igs is not unique, so compare as sets
        self.order_log() == other.order_log() && self.igs().iter().all(|x| other.contains(x))
    }
}

impl<'a> Subgroup<'a> {
    pub fn trivial(parent: &'a PcGroup) -> Self {
        Subgroup { parent, slots: [None; MAX_GENS] }
    }

    pub fn whole(parent: &'a PcGroup) -> Self {
        let mut s = Self::trivial(parent);
        for k in 0..parent.n() {
            s.slots[k] = Some(parent.generator(k + 1));
        }
        s
    }

    pub fn parent(&self) -> &'a PcGroup {
        self.parent
    }

    /// Members in increasing depth.
    pub fn igs(&self) -> Vec<ExponentVector> {
        self.slots.iter().flatten().copied().collect()
    }

    /// Depths (0-based) of the members.
    pub fn leading_indices(&self) -> Vec<usize> {
        (0..MAX_GENS).filter(|&d| self.slots[d].is_some()).collect()
    }

    pub fn order_log(&self) -> usize {
        self.slots.iter().flatten().count()
    }

    pub fn order(&self) -> u128 {
        (self.parent.p() as u128).pow(self.order_log() as u32)
    }

    /// Divides `x` by members from the top down; the result is the identity
    /// iff `x` lies in the subgroup.
    pub fn sift(&self, x: &ExponentVector) -> ExponentVector {
        let g = self.parent;
        let mut r = *x;
        while let Some(d) = r.depth() {
            match &self.slots[d] {
                None => return r,
                Some(h) => {
                    let k = g.p() - r.get(d);
                    r = g.multiply(&r, &g.power(h, k as i64));
                }
            }
        }
        r
    }

    pub fn contains(&self, x: &ExponentVector) -> bool {
        self.sift(x).is_identity()
    }

    /// Adds `x` and closes up again; with `normal` also closes under
    /// conjugation by the parent's generators.
    fn add(&mut self, x: ExponentVector, normal: bool) {
        let g = self.parent;
        let mut queue = vec![x];
        while let Some(y) = queue.pop() {
            let r = self.sift(&y);
            let Some(d) = r.depth() else { continue };
            let k = g.context().inv(r.get(d) as i64).expect("nonzero lead");
            let h = g.power(&r, k as i64);
            queue.push(g.power(&h, g.p() as i64));
            for other in self.slots.iter().flatten() {
                queue.push(g.commutator(&h, other));
            }
            if normal {
                for a in g.generators() {
                    queue.push(g.commutator(&h, &a));
                }
            }
            self.slots[d] = Some(h);
        }
    }

    pub fn is_normal(&self) -> bool {
        let g = self.parent;
        self.igs().iter().all(|h| g.generators().iter().all(|a| self.contains(&g.conjugate(h, a))))
    }

    /// Every element, in no particular order. Only for small subgroups.
    pub fn elements(&self) -> Vec<ExponentVector> {
        let g = self.parent;
        let mut out = vec![g.identity()];
        for h in self.igs().iter().rev() {
            let mut next = Vec::with_capacity(out.len() * g.p() as usize);
            let mut pw = g.identity();
            for _ in 0..g.p() {
                for x in &out {
                    next.push(g.multiply(&pw, x));
                }
                pw = g.multiply(&pw, h);
            }
            out = next;
        }
        out
    }
}

/// The smallest subgroup containing `seeds`.
pub fn closure<'a>(g: &'a PcGroup, seeds: &[ExponentVector]) -> Subgroup<'a> {
    let mut s = Subgroup::trivial(g);
    for x in seeds {
        s.add(*x, false);
    }
    s
}

/// The smallest normal subgroup containing `seeds`.
pub fn normal_closure<'a>(g: &'a PcGroup, seeds: &[ExponentVector]) -> Subgroup<'a> {
    let mut s = Subgroup::trivial(g);
    for x in seeds {
        s.add(*x, true);
    }
    s
}

/// The subgroup generated by two subgroups.
pub fn join<'a>(a: &Subgroup<'a>, b: &Subgroup<'a>) -> Subgroup<'a> {
    let mut s = a.clone();
    for x in b.igs() {
        s.add(x, false);
    }
    s
}

pub fn derived_subgroup(g: &PcGroup) -> Subgroup<'_> {
    let mut seeds = Vec::new();
    for j in 1..=g.n() {
        for i in 1..j {
            seeds.push(g.commutator(&g.generator(j), &g.generator(i)));
        }
    }
    normal_closure(g, &seeds)
}

/// `G = γ1 > γ2 > ... > 1`, ending with the trivial subgroup.
pub fn lower_central_series(g: &PcGroup) -> Vec<Subgroup<'_>> {
    let mut series = vec![Subgroup::whole(g)];
    loop {
        let last = series.last().unwrap();
        if last.order_log() == 0 {
            return series;
        }
        let mut seeds = Vec::new();
        for x in last.igs() {
            for a in g.generators() {
                seeds.push(g.commutator(&x, &a));
            }
        }
        let next = normal_closure(g, &seeds);
        if next.order_log() == last.order_log() {
            // not nilpotent; cannot happen for a consistent p-group
            return series;
        }
        series.push(next);
    }
}

/// Partition conjugate to `w`: `m_j = #{i : w_i >= j}`.
pub fn conjugate_partition(w: &[u32]) -> Vec<u32> {
    let top = w.iter().copied().max().unwrap_or(0);
    (1..=top).map(|j| w.iter().filter(|&&x| x >= j).count() as u32).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderType {
    pub w: Vec<u32>,
    pub m: Vec<u32>,
}

impl OrderType {
    pub fn from_w(w: Vec<u32>) -> Self {
        let m = conjugate_partition(&w);
        OrderType { w, m }
    }

    /// Runs of equal parts collapse to `m^δ`, e.g. `3^2` or `2 1^4`.
    pub fn rendered(&self) -> String {
        render_partition(&self.m)
    }
}

impl fmt::Display for OrderType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rendered())
    }
}

pub fn render_partition(parts: &[u32]) -> String {
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < parts.len() {
        let mut j = i;
        while j < parts.len() && parts[j] == parts[i] {
            j += 1;
        }
        if j - i > 1 {
            out.push(format!("{}^{}", parts[i], j - i));
        } else {
            out.push(parts[i].to_string());
        }
        i = j;
    }
    if out.is_empty() {
        "1".into()
    } else {
        out.join(" ")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    pub classes: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { classes: true }
    }
}

/// Isomorphism-invariant fingerprint. Orders are `log_p` values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InvariantProfile {
    pub p: u32,
    pub order_type: OrderType,
    pub centre_order: u32,
    pub derived_order: u32,
    pub frattini_quotient_rank: u32,
    pub lcs_orders: Vec<u32>,
    pub ucs_orders: Vec<u32>,
    /// class size -> number of classes; absent when not requested
    pub class_size_multiset: Option<BTreeMap<u64, u64>>,
    /// `log_p` of the exponent
    pub exponent: u32,
    /// `log_p` of the cyclic factors of `G/G'`, largest first
    pub abelian_invariants: Vec<u32>,
    pub nilpotency_class: u32,
}

impl InvariantProfile {
    pub fn class_count(&self) -> Option<u64> {
        self.class_size_multiset.as_ref().map(|m| m.values().sum())
    }

    pub fn exponent_value(&self) -> u128 {
        (self.p as u128).pow(self.exponent)
    }
}

/// Bulk computations that walk the whole group through [`DenseGroup`].
pub struct Analysis<'a> {
    g: &'a PcGroup,
    dense: DenseGroup,
}

fn orbit_closure(dense: &DenseGroup, set: &mut [bool], members: &mut Vec<u32>, gens: &[u32]) {
    let mut head = 0;
    while head < members.len() {
        let y = members[head];
        head += 1;
        for &a in gens {
            let z = dense.mul(y, a) as usize;
            if !set[z] {
                set[z] = true;
                members.push(z as u32);
            }
        }
    }
}

impl<'a> Analysis<'a> {
    pub fn new(g: &'a PcGroup, budget: u64) -> Result<Self, PcError> {
        Ok(Analysis { g, dense: DenseGroup::new(g, budget)? })
    }

    pub fn group(&self) -> &'a PcGroup {
        self.g
    }

    pub fn dense(&self) -> &DenseGroup {
        &self.dense
    }

    fn size(&self) -> usize {
        self.dense.order() as usize
    }

    /// Reads an igs off the characteristic function of a subgroup.
    pub fn subgroup_from_set(&self, set: &[bool]) -> Subgroup<'a> {
        let g = self.g;
        let mut s = Subgroup::trivial(g);
        let mut found = 0;
        for (r, &inside) in set.iter().enumerate() {
            if !inside || r == 0 {
                continue;
            }
            let x = g.element_at(r as u64);
            let d = x.depth().unwrap();
            if s.slots[d].is_none() {
                let k = g.context().inv(x.get(d) as i64).expect("nonzero lead");
                s.slots[d] = Some(g.power(&x, k as i64));
                found += 1;
                if found == g.n() {
                    break;
                }
            }
        }
        s
    }

    /// Characteristic function of a subgroup.
    pub fn set_of(&self, s: &Subgroup<'_>) -> Vec<bool> {
        let mut set = vec![false; self.size()];
        set[0] = true;
        let mut members = vec![0u32];
        let gens: Vec<u32> = s.igs().iter().map(|x| self.g.rank_of(x) as u32).collect();
        orbit_closure(&self.dense, &mut set, &mut members, &gens);
        set
    }

    /// Subgroup generated by the given elements (as ranks).
    pub fn generated_set(&self, candidates: impl IntoIterator<Item = u32>) -> Vec<bool> {
        let mut set = vec![false; self.size()];
        set[0] = true;
        let mut members = vec![0u32];
        let mut gens = Vec::new();
        for x in candidates {
            if !set[x as usize] {
                gens.push(x);
                let mut frontier = members.clone();
                let before = frontier.len();
                orbit_closure(&self.dense, &mut set, &mut frontier, &gens);
                members.extend_from_slice(&frontier[before..]);
            }
        }
        set
    }

    #[inline]
    fn comm_with_generator(&self, x: u32, i: usize) -> u32 {
        self.dense.mul(self.dense.inverse(x), self.dense.conjugate_by_generator(x, i))
    }

    // [x, a_i] for every x, generator-major
    fn generator_commutators(&self) -> Vec<u32> {
        let size = self.size() as u32;
        (1..=self.g.n()).flat_map(|i| (0..size).map(move |x| self.comm_with_generator(x, i))).collect()
    }

    /// `{x : [x, a_i] in Z for every generator}` for a normal subgroup `Z`.
    fn next_centre(&self, comms: &[u32], below: &[bool]) -> Vec<bool> {
        let size = self.size();
        let mut out = vec![true; size];
        for row in comms.chunks(size) {
            for (slot, &c) in out.iter_mut().zip(row) {
                *slot &= below[c as usize];
            }
        }
        out
    }

    pub fn center(&self) -> Subgroup<'a> {
        let mut trivial = vec![false; self.size()];
        trivial[0] = true;
        self.subgroup_from_set(&self.next_centre(&self.generator_commutators(), &trivial))
    }

    /// `1 = Z0 < Z1 < ... < G`.
    pub fn upper_central_series(&self) -> Vec<Subgroup<'a>> {
        let comms = self.generator_commutators();
        let mut cur = vec![false; self.size()];
        cur[0] = true;
        let mut out = vec![Subgroup::trivial(self.g)];
        loop {
            let next = self.next_centre(&comms, &cur);
            let s = self.subgroup_from_set(&next);
            if s.order_log() == out.last().unwrap().order_log() {
                return out;
            }
            let done = s.order_log() == self.g.n();
            out.push(s);
            if done {
                return out;
            }
            cur = next;
        }
    }

    /// `℧^0 = G, ℧^1, ...` down to the trivial subgroup.
    pub fn agemo_series(&self) -> Vec<Subgroup<'a>> {
        let p = self.g.p() as u64;
        let pmap: Vec<u32> = (0..self.size() as u32).map(|x| self.dense.power(x, p)).collect();
        let mut image: Vec<bool> = vec![true; self.size()];
        let mut out = vec![Subgroup::whole(self.g)];
        while out.last().unwrap().order_log() > 0 {
            let mut next = vec![false; self.size()];
            for (x, &inside) in image.iter().enumerate() {
                if inside {
                    next[pmap[x] as usize] = true;
                }
            }
            image = next;
            let members = image.iter().enumerate().filter(|(_, &b)| b).map(|(x, _)| x as u32);
            let set = self.generated_set(members);
            out.push(self.subgroup_from_set(&set));
        }
        out
    }

    /// `℧^i(G) = <g^(p^i)>`.
    pub fn agemo(&self, i: usize) -> Subgroup<'a> {
        let series = self.agemo_series();
        series.get(i).cloned().unwrap_or_else(|| Subgroup::trivial(self.g))
    }

    pub fn order_type(&self) -> OrderType {
        order_type_of(&self.agemo_series())
    }

    /// class size -> number of classes.
    pub fn conjugacy_classes(&self) -> BTreeMap<u64, u64> {
        let n = self.g.n();
        let mut seen = vec![false; self.size()];
        let mut sizes = BTreeMap::new();
        let mut orbit = Vec::new();
        for x in 0..self.size() as u32 {
            if seen[x as usize] {
                continue;
            }
            seen[x as usize] = true;
            orbit.clear();
            orbit.push(x);
            let mut head = 0;
            while head < orbit.len() {
                let y = orbit[head];
                head += 1;
                for i in 1..=n {
                    let z = self.dense.conjugate_by_generator(y, i);
                    if !seen[z as usize] {
                        seen[z as usize] = true;
                        orbit.push(z);
                    }
                }
            }
            *sizes.entry(orbit.len() as u64).or_insert(0) += 1;
        }
        sizes
    }

    pub fn profile(&self, opts: ProfileOptions) -> InvariantProfile {
        let g = self.g;
        let lcs = lower_central_series(g);
        let ucs = self.upper_central_series();
        let agemo = self.agemo_series();
        let derived = lcs.get(1).cloned().unwrap_or_else(|| Subgroup::trivial(g));
        let order_type = order_type_of(&agemo);
        // G/G' has agemo series ℧^i(G)G'/G'
        let mut quotient_w = Vec::new();
        let mut prev = g.n() as u32;
        for a in agemo.iter().skip(1) {
            let cur = join(a, &derived).order_log() as u32;
            if prev == derived.order_log() as u32 {
                break;
            }
            quotient_w.push(prev - cur);
            prev = cur;
        }
        let frattini = join(&agemo.get(1).cloned().unwrap_or_else(|| Subgroup::trivial(g)), &derived);
        InvariantProfile {
            p: g.p(),
            order_type,
            centre_order: ucs.get(1).map_or(0, |z| z.order_log()) as u32,
            derived_order: derived.order_log() as u32,
            frattini_quotient_rank: (g.n() - frattini.order_log()) as u32,
            lcs_orders: lcs.iter().map(|s| s.order_log() as u32).collect(),
            ucs_orders: ucs.iter().map(|s| s.order_log() as u32).collect(),
            class_size_multiset: opts.classes.then(|| self.conjugacy_classes()),
            exponent: (agemo.len() - 1) as u32,
            abelian_invariants: conjugate_partition(&quotient_w),
            nilpotency_class: (lcs.len() - 1) as u32,
        }
    }
}

fn order_type_of(agemo: &[Subgroup<'_>]) -> OrderType {
    let w = agemo.windows(2).map(|s| (s[0].order_log() - s[1].order_log()) as u32).collect();
    OrderType::from_w(w)
}

/// One-shot helpers that build the dense tables with the default budget.
pub fn center(g: &PcGroup) -> Result<Subgroup<'_>, PcError> {
    Ok(Analysis::new(g, DEFAULT_BUDGET)?.center())
}

pub fn upper_central_series(g: &PcGroup) -> Result<Vec<Subgroup<'_>>, PcError> {
    Ok(Analysis::new(g, DEFAULT_BUDGET)?.upper_central_series())
}

pub fn agemo(g: &PcGroup, i: usize) -> Result<Subgroup<'_>, PcError> {
    Ok(Analysis::new(g, DEFAULT_BUDGET)?.agemo(i))
}

pub fn order_type(g: &PcGroup) -> Result<OrderType, PcError> {
    Ok(Analysis::new(g, DEFAULT_BUDGET)?.order_type())
}

pub fn conjugacy_classes(g: &PcGroup) -> Result<BTreeMap<u64, u64>, PcError> {
    Ok(Analysis::new(g, DEFAULT_BUDGET)?.conjugacy_classes())
}

pub fn profile(g: &PcGroup) -> Result<InvariantProfile, PcError> {
    Ok(Analysis::new(g, DEFAULT_BUDGET)?.profile(ProfileOptions::default()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_partitions() {
        assert_eq!(conjugate_partition(&[6]), vec![1; 6]);
        assert_eq!(conjugate_partition(&[1; 6]), vec![6]);
        assert_eq!(conjugate_partition(&[2, 2, 2]), vec![3, 3]);
        assert_eq!(conjugate_partition(&[3, 2, 1]), vec![3, 2, 1]);
    }

    #[test]
    fn rendering_collapses_runs() {
        assert_eq!(OrderType::from_w(vec![6]).rendered(), "1^6");
        assert_eq!(OrderType::from_w(vec![1; 6]).rendered(), "6");
        assert_eq!(OrderType::from_w(vec![2, 2, 2]).rendered(), "3^2");
        assert_eq!(render_partition(&[2, 1, 1, 1, 1]), "2 1^4");
    }
}
