//! Independent reference implementations shared by the test targets.
//!
//! Multiplication is done by naive rewriting of words in positive letters;
//! every subgroup and series is then computed by brute force over element
//! sets. Nothing here uses the crate's collector or subgroup code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use p6groups::invariants::{conjugacy_classes, derived_subgroup, lower_central_series, Analysis, Subgroup};
use p6groups::numtheory::PrimeContext;
use p6groups::pcgroup::{ExponentVector, PcGroup, PcPresentation};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Rewrites a word in positive letters to the normal form of `pres`.
fn normalize(pres: &PcPresentation, mut w: Vec<usize>) -> Vec<u32> {
    let (n, p) = (pres.n(), pres.p() as usize);
    let letters = |v: ExponentVector| -> Vec<usize> {
        (0..n).flat_map(|k| std::iter::repeat_n(k, v.get(k) as usize)).collect()
    };
    loop {
        // a_j a_i = a_i a_j [a_j, a_i]
        if let Some(t) = (0..w.len().saturating_sub(1)).find(|&t| w[t] > w[t + 1]) {
            let (j, i) = (w[t], w[t + 1]);
            let mut rep = vec![i, j];
            rep.extend(letters(pres.comm_rhs(j + 1, i + 1)));
            w.splice(t..t + 2, rep);
            continue;
        }
        let mut counts = vec![0usize; n];
        for &k in &w {
            counts[k] += 1;
        }
        match (0..n).find(|&k| counts[k] >= p) {
            Some(k) => {
                let start = w.iter().position(|&x| x == k).unwrap();
                w.splice(start..start + p, letters(pres.power_rhs(k + 1)));
            }
            None => return counts.into_iter().map(|c| c as u32).collect(),
        }
    }
}

/// Finite group on `0..size` given by a full multiplication table.
pub struct Oracle {
    pub p: u32,
    pub n: usize,
    pub size: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
}

pub fn rank(v: &[u32], p: u32) -> u32 {
    v.iter().fold(0, |acc, &x| acc * p + x)
}

pub fn unrank(mut r: u32, p: u32, n: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    for k in (0..n).rev() {
        v[k] = r % p;
        r /= p;
    }
    v
}

impl Oracle {
    pub fn from_presentation(pres: &PcPresentation) -> Oracle {
        let (p, n) = (pres.p(), pres.n());
        let size = (p as usize).pow(n as u32);
        // right multiplication by each generator, then walk the letters of y
        let mut right = vec![0u32; size * n];
        for x in 0..size {
            let v = unrank(x as u32, p, n);
            let mut word: Vec<usize> = (0..n).flat_map(|k| std::iter::repeat_n(k, v[k] as usize)).collect();
            for k in 0..n {
                word.push(k);
                right[x * n + k] = rank(&normalize(pres, word.clone()), p);
                word.pop();
            }
        }
        let mut table = vec![0u32; size * size];
        for x in 0..size {
            for y in 0..size {
                let mut acc = x as u32;
                for (k, e) in unrank(y as u32, p, n).into_iter().enumerate() {
                    for _ in 0..e {
                        acc = right[acc as usize * n + k];
                    }
                }
                table[x * size + y] = acc;
            }
        }
        Oracle::from_table(p, n, table)
    }

    pub fn from_table(p: u32, n: usize, table: Vec<u32>) -> Oracle {
        let size = (p as usize).pow(n as u32);
        let mut inv = vec![0u32; size];
        for x in 0..size {
            inv[x] = (0..size as u32).find(|&y| table[x * size + y as usize] == 0).expect("inverse exists");
        }
        Oracle { p, n, size, table, inv }
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        self.table[x as usize * self.size + y as usize]
    }

    pub fn comm(&self, x: u32, y: u32) -> u32 {
        let a = self.mul(self.inv[x as usize], self.inv[y as usize]);
        self.mul(self.mul(a, x), y)
    }

    pub fn pow(&self, x: u32, k: u64) -> u32 {
        (0..k).fold(0, |acc, _| self.mul(acc, x))
    }

    pub fn closure(&self, seeds: impl IntoIterator<Item = u32>) -> BTreeSet<u32> {
        let seeds: Vec<u32> = seeds.into_iter().collect();
        let mut set: BTreeSet<u32> = BTreeSet::from([0]);
        let mut frontier = vec![0u32];
        while let Some(x) = frontier.pop() {
            for &s in &seeds {
                let y = self.mul(x, s);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    pub fn all(&self) -> BTreeSet<u32> {
        (0..self.size as u32).collect()
    }

    pub fn centre(&self) -> BTreeSet<u32> {
        (0..self.size as u32).filter(|&z| (0..self.size as u32).all(|g| self.mul(z, g) == self.mul(g, z))).collect()
    }

    pub fn commutator_subgroup(&self, a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> BTreeSet<u32> {
        let mut seeds = BTreeSet::new();
        for &x in a {
            for &y in b {
                seeds.insert(self.comm(x, y));
            }
        }
        self.closure(seeds)
    }

    pub fn lower_central(&self) -> Vec<BTreeSet<u32>> {
        let g = self.all();
        let mut out = vec![g.clone()];
        while out.last().unwrap().len() > 1 {
            let next = self.commutator_subgroup(out.last().unwrap(), &g);
            assert!(next.len() < out.last().unwrap().len(), "not nilpotent");
            out.push(next);
        }
        out
    }

    pub fn upper_central(&self) -> Vec<BTreeSet<u32>> {
        let mut out = vec![BTreeSet::from([0u32])];
        while out.last().unwrap().len() < self.size {
            let z = out.last().unwrap();
            let next: BTreeSet<u32> = (0..self.size as u32)
                .filter(|&x| (0..self.size as u32).all(|g| z.contains(&self.comm(x, g))))
                .collect();
            assert!(next.len() > z.len(), "not nilpotent");
            out.push(next);
        }
        out
    }

    /// class size -> number of classes
    pub fn classes(&self) -> BTreeMap<u64, u64> {
        let mut seen = vec![false; self.size];
        let mut out = BTreeMap::new();
        for x in 0..self.size as u32 {
            if seen[x as usize] {
                continue;
            }
            let class: BTreeSet<u32> =
                (0..self.size as u32).map(|g| self.mul(self.mul(self.inv[g as usize], x), g)).collect();
            for &y in &class {
                seen[y as usize] = true;
            }
            *out.entry(class.len() as u64).or_insert(0) += 1;
        }
        out
    }

    /// `G = ℧^0 > ℧^1 > ... > 1`
    pub fn agemo(&self) -> Vec<BTreeSet<u32>> {
        let mut out = Vec::new();
        let mut q = 1u64;
        loop {
            let s = self.closure((0..self.size as u32).map(|x| self.pow(x, q)));
            let done = s.len() == 1;
            out.push(s);
            if done {
                return out;
            }
            q *= self.p as u64;
        }
    }
}

fn as_ranks(g: &PcGroup, s: &Subgroup<'_>) -> BTreeSet<u32> {
    s.elements().iter().map(|x| rank(&x.exponents(), g.p())).collect()
}

/// Checks the engine against the oracle on everything criterion-level tests
/// care about; returns the first disagreement.
pub fn compare_engine(g: &PcGroup, o: &Oracle) -> Result<(), String> {
    let p = g.p();
    for x in 0..o.size as u32 {
        let vx = ExponentVector::from_exponents(&unrank(x, p, g.n()));
        for y in 0..o.size as u32 {
            let vy = ExponentVector::from_exponents(&unrank(y, p, g.n()));
            let ours = rank(&g.multiply(&vx, &vy).exponents(), p);
            if ours != o.mul(x, y) {
                return Err(format!("{vx} * {vy}: engine {ours}, oracle {}", o.mul(x, y)));
            }
        }
    }
    let a = Analysis::new(g, 1 << 20).map_err(|e| e.to_string())?;
    let dense = a.dense();
    for x in 0..o.size as u32 {
        for y in (0..o.size as u32).step_by(7) {
            if dense.mul(x, y) != o.mul(x, y) {
                return Err(format!("dense product {x} * {y} differs"));
            }
        }
    }
    if as_ranks(g, &a.center()) != o.centre() {
        return Err("centre differs".into());
    }
    if as_ranks(g, &derived_subgroup(g)) != o.commutator_subgroup(&o.all(), &o.all()) {
        return Err("derived subgroup differs".into());
    }
    let lcs: Vec<BTreeSet<u32>> = lower_central_series(g).iter().map(|s| as_ranks(g, s)).collect();
    if lcs != o.lower_central() {
        return Err("lower central series differs".into());
    }
    let ucs: Vec<BTreeSet<u32>> = a.upper_central_series().iter().map(|s| as_ranks(g, s)).collect();
    if ucs != o.upper_central() {
        return Err("upper central series differs".into());
    }
    if conjugacy_classes(g).map_err(|e| e.to_string())? != o.classes() {
        return Err("conjugacy classes differ".into());
    }
    let agemo: Vec<BTreeSet<u32>> = a.agemo_series().iter().map(|s| as_ranks(g, s)).collect();
    if agemo != o.agemo() {
        return Err("agemo series differs".into());
    }
    Ok(())
}

/// `[a3, a2] = a1` at `p`.
pub fn heisenberg(p: u64) -> PcPresentation {
    let ctx = PrimeContext::new(p).unwrap();
    let mut pres = PcPresentation::new(&ctx, 3).unwrap();
    pres.set_comm(3, 2, ExponentVector::generator(3, 1)).unwrap();
    pres
}

type Mat = [[u32; 3]; 3];

fn mat_mul(a: &Mat, b: &Mat, p: u32) -> Mat {
    let mut c = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum::<u32>() % p;
        }
    }
    c
}

/// Multiplication table of the upper unitriangular 3x3 matrices over F_p,
/// indexed through `a1 -> I + E13`, `a2 -> I + E23`, `a3 -> I + E12`, with
/// the normal word `a1^x a2^y a3^z` mapped to the matching matrix product.
pub fn unitriangular_oracle(p: u32) -> Oracle {
    let id: Mat = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let mut gens = [id; 3];
    gens[0][0][2] = 1;
    gens[1][1][2] = 1;
    gens[2][0][1] = 1;
    let size = (p * p * p) as usize;
    let mut mats = Vec::with_capacity(size);
    for r in 0..size as u32 {
        let v = unrank(r, p, 3);
        let mut m = id;
        for k in 0..3 {
            for _ in 0..v[k] {
                m = mat_mul(&m, &gens[k], p);
            }
        }
        mats.push(m);
    }
    let index: BTreeMap<Mat, u32> = mats.iter().enumerate().map(|(r, m)| (*m, r as u32)).collect();
    assert_eq!(index.len(), size, "normal words give distinct matrices");
    let mut table = vec![0u32; size * size];
    for x in 0..size {
        for y in 0..size {
            table[x * size + y] = index[&mat_mul(&mats[x], &mats[y], p)];
        }
    }
    Oracle::from_table(p, 3, table)
}

/// Consistent presentations with random relations, drawn until `count`
/// are found. Orders run from `3^2` up to `5^4`; two thirds are
/// nonabelian.
pub fn random_consistent(count: usize, seed: u64) -> Vec<PcPresentation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let p: u64 = if rng.gen_bool(0.5) { 3 } else { 5 };
        let n: usize = if rng.gen_bool(0.2) { 2 } else { rng.gen_range(3..=4) };
        let ctx = PrimeContext::new(p).unwrap();
        let mut pres = PcPresentation::new(&ctx, n).unwrap();
        let below = |k: usize, chance: f64, rng: &mut ChaCha8Rng| {
            let mut v = vec![0u32; n];
            if rng.gen_bool(chance) {
                for slot in v.iter_mut().take(k) {
                    if rng.gen_bool(0.7) {
                        *slot = rng.gen_range(0..p as u32);
                    }
                }
            }
            ExponentVector::from_exponents(&v)
        };
        for i in 2..=n {
            pres.set_power(i, below(i - 1, 0.4, &mut rng)).unwrap();
            for j in i + 1..=n {
                pres.set_comm(j, i, below(i - 1, 0.8, &mut rng)).unwrap();
            }
        }
        // two in three samples must be nonabelian
        let abelian = (2..=n).all(|j| (1..j).all(|i| pres.comm_rhs(j, i).is_identity()));
        if abelian && out.len() % 3 != 0 {
            continue;
        }
        if pres.consistency_check().is_consistent() {
            out.push(pres);
        }
    }
    out
}

/// A copy of the shipped data with one extra commutator relation in the
/// first block of family 15, which makes that entry inconsistent.
pub fn corrupted_data() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(data_dir()).unwrap() {
        let path = entry.unwrap().path();
        let mut text = std::fs::read_to_string(&path).unwrap();
        if path.file_name().unwrap() == "phi15.p6" {
            let anchor = "  comm [a4,a6] = a1^nu\n}";
            assert!(text.contains(anchor));
            text = text.replacen(anchor, "  comm [a4,a6] = a1^nu\n  comm [a2,a3] = a1\n}", 1);
        }
        std::fs::write(dir.path().join(path.file_name().unwrap()), text).unwrap();
    }
    dir
}

pub const CORRUPTED_LABEL: &str = "(15,1)";
