//! Power-commutator presentations with relative orders `p`, collection from
//! the left, and the consistency check.
//!
//! Generators are numbered `a1..an` with `a1` the most central. Normal words
//! are `a1^e1 ... an^en` with `0 <= ei < p`. Every relation right-hand side
//! lies strictly below the generators it involves: `ai^p` is a word in
//! `a1..a(i-1)` and `[aj, ai]` (for `j > i`) is a word in `a1..a(i-1)`.
//! Commutators are `[x, y] = x^-1 y^-1 x y`.

use std::cell::RefCell;
use std::fmt;

use thiserror::Error;

use crate::numtheory::PrimeContext;

/// Largest supported number of polycyclic generators.
pub const MAX_GENS: usize = 8;

/// Default cap on element enumeration.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed presentation: {0}")]
    Malformed(String),
    #[error("inconsistent presentation: {0}")]
    Inconsistent(Box<ConsistencyReport>),
    #[error("enumeration of {needed} elements exceeds the budget of {budget}")]
    Budget { needed: u128, budget: u64 },
}

/// A group element in normal form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector {
    n: u8,
    e: [u16; MAX_GENS],
}

impl ExponentVector {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_GENS, "at most {MAX_GENS} generators");
        ExponentVector { n: n as u8, e: [0; MAX_GENS] }
    }

    /// The generator `a_i`, 1-based.
    pub fn generator(n: usize, i: usize) -> Self {
        let mut v = Self::identity(n);
        v.e[i - 1] = 1;
        v
    }

    /// Entries must already be reduced; use [`PcGroup::collect`] otherwise.
    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut v = Self::identity(exps.len());
        for (k, &x) in exps.iter().enumerate() {
            v.e[k] = x as u16;
        }
        v
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Exponent of `a_(k+1)`.
    pub fn get(&self, k: usize) -> u32 {
        self.e[k] as u32
    }

    pub fn set(&mut self, k: usize, x: u32) {
        self.e[k] = x as u16;
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.e[..self.len()].iter().map(|&x| x as u32).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.e.iter().all(|&x| x == 0)
    }

    /// 0-based index of the highest nonzero exponent: the element lies in
    /// `<a1..a(d+1)>` but not in `<a1..ad>`.
    pub fn depth(&self) -> Option<usize> {
        (0..self.len()).rev().find(|&k| self.e[k] != 0)
    }

    /// Nonzero entries all have index below `k` (0-based).
    pub fn supported_below(&self, k: usize) -> bool {
        (k..self.len()).all(|i| self.e[i] == 0)
    }

    fn raw(&self) -> [u32; MAX_GENS] {
        std::array::from_fn(|k| self.e[k] as u32)
    }

    fn from_raw(n: usize, v: &[u32; MAX_GENS]) -> Self {
        let mut out = Self::identity(n);
        for (dst, &x) in out.e.iter_mut().zip(&v[..n]) {
            *dst = x as u16;
        }
        out
    }
}

impl fmt::Debug for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for k in 0..self.len() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.e[k])?;
        }
        write!(f, ")")
    }
}

/// Renders `a1^2*a3` style words; the identity is `1`.
pub fn format_word(v: &ExponentVector, names: &[String], sep: &str) -> String {
    let mut parts = Vec::new();
    for (k, name) in names.iter().enumerate().take(v.len()) {
        match v.get(k) {
            0 => {}
            1 => parts.push(name.clone()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(sep)
    }
}

fn tri(j: usize, i: usize) -> usize {
    j * (j - 1) / 2 + i
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcPresentation {
    ctx: PrimeContext,
    n: usize,
    power: Vec<ExponentVector>,
    comm: Vec<ExponentVector>,
    names: Vec<String>,
}

impl PcPresentation {
    /// All relations trivial: the elementary abelian group of order `p^n`.
    pub fn new(ctx: &PrimeContext, n: usize) -> Result<Self, PcError> {
        if n == 0 || n > MAX_GENS {
            return Err(PcError::InvalidArgument(format!("generator count {n} outside 1..={MAX_GENS}")));
        }
        Ok(PcPresentation {
            ctx: ctx.clone(),
            n,
            power: vec![ExponentVector::identity(n); n],
            comm: vec![ExponentVector::identity(n); n * (n - 1) / 2],
            names: (1..=n).map(|i| format!("a{i}")).collect(),
        })
    }

    pub fn context(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn p(&self) -> u32 {
        self.ctx.p()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn set_names(&mut self, names: Vec<String>) -> Result<(), PcError> {
        if names.len() != self.n {
            return Err(PcError::InvalidArgument("one name per generator".into()));
        }
        self.names = names;
        Ok(())
    }

    /// Composition-series position of each generator.
    pub fn weights(&self) -> Vec<usize> {
        (1..=self.n).collect()
    }

    fn check_vec(&self, rhs: &ExponentVector) -> Result<(), PcError> {
        if rhs.len() != self.n || (0..self.n).any(|k| rhs.get(k) >= self.p()) {
            return Err(PcError::InvalidArgument(format!("{rhs} is not a normal word for this presentation")));
        }
        Ok(())
    }

    /// Set `a_i^p = rhs` (1-based).
    pub fn set_power(&mut self, i: usize, rhs: ExponentVector) -> Result<(), PcError> {
        if i == 0 || i > self.n {
            return Err(PcError::InvalidArgument(format!("generator index {i} out of range")));
        }
        self.check_vec(&rhs)?;
        if !rhs.supported_below(i - 1) {
            return Err(PcError::Malformed(format!("a{i}^p = {rhs} involves a{i} or later generators")));
        }
        self.power[i - 1] = rhs;
        Ok(())
    }

    /// Set `[a_j, a_i] = rhs` for `j > i` (1-based).
    pub fn set_comm(&mut self, j: usize, i: usize, rhs: ExponentVector) -> Result<(), PcError> {
        if i == j {
            return Err(PcError::InvalidArgument(format!("commutator key [a{j},a{i}] has equal indices")));
        }
        if i == 0 || j > self.n || j < i {
            return Err(PcError::InvalidArgument(format!("commutator key [a{j},a{i}] must have {} >= j > i >= 1", self.n)));
        }
        self.check_vec(&rhs)?;
        if !rhs.supported_below(i - 1) {
            return Err(PcError::Malformed(format!("[a{j},a{i}] = {rhs} is not below a{i}")));
        }
        self.comm[tri(j - 1, i - 1)] = rhs;
        Ok(())
    }

    pub fn power_rhs(&self, i: usize) -> ExponentVector {
        self.power[i - 1]
    }

    pub fn comm_rhs(&self, j: usize, i: usize) -> ExponentVector {
        self.comm[tri(j - 1, i - 1)]
    }

    /// The presentation on the first `k` generators, which by the support
    /// condition is a presentation of the subgroup `<a1..ak>`.
    pub fn prefix(&self, k: usize) -> Result<PcPresentation, PcError> {
        let mut out = PcPresentation::new(&self.ctx, k)?;
        let shrink = |v: &ExponentVector| ExponentVector::from_exponents(&v.exponents()[..k]);
        for i in 1..=k {
            out.set_power(i, shrink(&self.power_rhs(i)))?;
            for j in i + 1..=k {
                out.set_comm(j, i, shrink(&self.comm_rhs(j, i)))?;
            }
        }
        out.names = self.names[..k].to_vec();
        Ok(out)
    }

    /// Evaluates every overlap condition; the presentation defines a group of
    /// order exactly `p^n` iff all hold.
    pub fn consistency_check(&self) -> ConsistencyReport {
        Collector::new(self).consistency()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyFailure {
    pub condition: String,
    pub left: ExponentVector,
    pub right: ExponentVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub checks: usize,
    pub failure: Option<ConsistencyFailure>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "consistent ({} conditions)", self.checks),
            Some(x) => write!(f, "{} fails: {} != {}", x.condition, x.left, x.right),
        }
    }
}

type Syllable = (u8, u32);

thread_local! {
    static SCRATCH: RefCell<Vec<Syllable>> = RefCell::new(Vec::with_capacity(256));
}

/// Collection engine over a presentation, usable before verification.
#[derive(Debug, Clone)]
struct Collector {
    n: usize,
    p: u32,
    power_words: Vec<Vec<Syllable>>,
    // a_j^{a_i} = a_j [a_j, a_i], stored as a word for j > i
    conj_words: Vec<Vec<Syllable>>,
    // normal word of (a_j^c)^{a_i} at tri(j, i) * p + c; empty for large p
    conj_pow: Vec<Vec<Syllable>>,
}

/// Conjugates of generator powers are tabulated up to this prime.
const CONJ_TABLE_MAX_P: u32 = 257;

fn syllables(v: &ExponentVector) -> Vec<Syllable> {
    (0..v.len()).filter(|&k| v.get(k) != 0).map(|k| (k as u8, v.get(k))).collect()
}

impl Collector {
    fn new(pres: &PcPresentation) -> Self {
        let n = pres.n;
        let power_words = pres.power.iter().map(syllables).collect();
        let mut conj_words = vec![Vec::new(); n * (n - 1) / 2];
        for j in 1..n {
            for i in 0..j {
                let mut w = vec![(j as u8, 1)];
                w.extend(syllables(&pres.comm[tri(j, i)]));
                conj_words[tri(j, i)] = w;
            }
        }
        let p = pres.p();
        let mut col = Collector { n, p, power_words, conj_words, conj_pow: Vec::new() };
        if p <= CONJ_TABLE_MAX_P && n > 1 {
            let pu = p as usize;
            col.conj_pow = vec![Vec::new(); n * (n - 1) / 2 * pu];
            // conjugation by a_i only needs the entries for smaller i
            for i in 0..n {
                for j in i + 1..n {
                    let mut cur = ExponentVector::identity(n);
                    for c in 1..pu {
                        cur = col.mul_syllables(&cur, &col.conj_words[tri(j, i)]);
                        col.conj_pow[tri(j, i) * pu + c] = syllables(&cur);
                    }
                }
            }
        }
        col
    }

    fn run(&self, v: &mut [u32; MAX_GENS], stack: &mut Vec<Syllable>) {
        let p = self.p;
        while let Some((g, e)) = stack.pop() {
            let g = g as usize;
            let mut top = g;
            for k in (g + 1..self.n).rev() {
                if v[k] != 0 {
                    top = k;
                    break;
                }
            }
            if top == g {
                let s = v[g] + e;
                if s < p {
                    v[g] = s;
                } else {
                    v[g] = s - p;
                    for &syl in self.power_words[g].iter().rev() {
                        stack.push(syl);
                    }
                }
                continue;
            }
            // v = P * S with S above a_g, so v * a_g = (P * a_g) * S^{a_g}
            if e > 1 {
                stack.push((g as u8, e - 1));
            }
            for k in (g + 1..=top).rev() {
                let c = v[k];
                if c == 0 {
                    continue;
                }
                v[k] = 0;
                if let Some(w) = self.conj_pow.get(tri(k, g) * p as usize + c as usize) {
                    if !w.is_empty() {
                        stack.extend(w.iter().rev());
                        continue;
                    }
                }
                let w = &self.conj_words[tri(k, g)];
                if w.len() == 1 {
                    stack.push((k as u8, c));
                } else {
                    for _ in 0..c {
                        for &syl in w.iter().rev() {
                            stack.push(syl);
                        }
                    }
                }
            }
            stack.push((g as u8, 1));
        }
    }

    /// `x * (word given as syllables in order)`.
    fn mul_syllables(&self, x: &ExponentVector, word: &[Syllable]) -> ExponentVector {
        SCRATCH.with(|s| {
            let mut stack = s.borrow_mut();
            stack.clear();
            stack.extend(word.iter().rev().copied());
            let mut v = x.raw();
            self.run(&mut v, &mut stack);
            ExponentVector::from_raw(self.n, &v)
        })
    }

    fn mul(&self, x: &ExponentVector, y: &ExponentVector) -> ExponentVector {
        let mut word = [(0u8, 0u32); MAX_GENS];
        let mut len = 0;
        for k in 0..self.n {
            if y.get(k) != 0 {
                word[len] = (k as u8, y.get(k));
                len += 1;
            }
        }
        self.mul_syllables(x, &word[..len])
    }

    fn inverse(&self, x: &ExponentVector) -> ExponentVector {
        // peel off the top generator until x * w = 1, then x^-1 = w
        let mut r = *x;
        let mut word: Vec<Syllable> = Vec::new();
        while let Some(d) = r.depth() {
            let s = (d as u8, self.p - r.get(d));
            r = self.mul_syllables(&r, &[s]);
            word.push(s);
        }
        self.mul_syllables(&ExponentVector::identity(self.n), &word)
    }

    fn power(&self, x: &ExponentVector, mut k: u128) -> ExponentVector {
        let mut acc = ExponentVector::identity(self.n);
        let mut base = *x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn consistency(&self) -> ConsistencyReport {
        let n = self.n;
        let p = self.p;
        let id = ExponentVector::identity(n);
        let gen = |i: usize| ExponentVector::generator(n, i + 1);
        let mut checks = 0;
        let mut fail = None;
        let mut test = |name: String, l: ExponentVector, r: ExponentVector| {
            checks += 1;
            if l != r && fail.is_none() {
                fail = Some(ConsistencyFailure { condition: name, left: l, right: r });
            }
        };
        // (a_k a_j) a_i = a_k (a_j a_i)
        for k in 0..n {
            for j in 0..k {
                for i in 0..j {
                    let kj = self.mul(&gen(k), &gen(j));
                    let ji = self.mul(&gen(j), &gen(i));
                    test(
                        format!("(a{} a{}) a{} = a{} (a{} a{})", k + 1, j + 1, i + 1, k + 1, j + 1, i + 1),
                        self.mul(&kj, &gen(i)),
                        self.mul(&gen(k), &ji),
                    );
                }
            }
        }
        for j in 0..n {
            let pj = self.power_words[j].clone();
            let pow_j = self.mul_syllables(&id, &pj);
            for i in 0..j {
                // (a_j^p) a_i = a_j^(p-1) (a_j a_i)
                let ji = self.mul(&gen(j), &gen(i));
                let mut top = id;
                top.set(j, p - 1);
                test(
                    format!("(a{}^p) a{} = a{}^(p-1) (a{} a{})", j + 1, i + 1, j + 1, j + 1, i + 1),
                    self.mul(&pow_j, &gen(i)),
                    self.mul(&top, &ji),
                );
                // a_j (a_i^p) = (a_j a_i) a_i^(p-1)
                let pi = &self.power_words[i];
                test(
                    format!("a{} (a{}^p) = (a{} a{}) a{}^(p-1)", j + 1, i + 1, j + 1, i + 1, i + 1),
                    self.mul_syllables(&gen(j), pi),
                    self.mul_syllables(&ji, &[(i as u8, p - 1)]),
                );
            }
            // (a_j^p) a_j = a_j (a_j^p)
            test(
                format!("(a{}^p) a{} = a{} (a{}^p)", j + 1, j + 1, j + 1, j + 1),
                self.mul(&pow_j, &gen(j)),
                self.mul_syllables(&gen(j), &pj),
            );
        }
        ConsistencyReport { checks, failure: fail }
    }
}

/// Explicit opt-in for computing with a presentation that failed (or skipped)
/// the consistency check.
#[derive(Debug, Clone, Copy)]
pub struct AllowUnverified;

/// A compiled polycyclic group. Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct PcGroup {
    pres: PcPresentation,
    col: Collector,
    verified: bool,
}

impl PcGroup {
    /// Runs the consistency check; fails with the first violated condition.
    pub fn new(pres: PcPresentation) -> Result<Self, PcError> {
        let report = pres.consistency_check();
        if !report.is_consistent() {
            return Err(PcError::Inconsistent(Box::new(report)));
        }
        let col = Collector::new(&pres);
        Ok(PcGroup { pres, col, verified: true })
    }

    /// Skips verification; results are meaningless on inconsistent input.
    pub fn new_unverified(pres: PcPresentation, _override: AllowUnverified) -> Self {
        let col = Collector::new(&pres);
        PcGroup { pres, col, verified: false }
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn presentation(&self) -> &PcPresentation {
        &self.pres
    }

    pub fn context(&self) -> &PrimeContext {
        &self.pres.ctx
    }

    pub fn p(&self) -> u32 {
        self.pres.p()
    }

    pub fn n(&self) -> usize {
        self.pres.n
    }

    /// `log_p` of the group order.
    pub fn order_log(&self) -> usize {
        self.pres.n
    }

    pub fn order(&self) -> u128 {
        (self.p() as u128).pow(self.n() as u32)
    }

    pub fn identity(&self) -> ExponentVector {
        ExponentVector::identity(self.n())
    }

    /// Generator `a_i`, 1-based.
    pub fn generator(&self, i: usize) -> ExponentVector {
        ExponentVector::generator(self.n(), i)
    }

    pub fn generators(&self) -> Vec<ExponentVector> {
        (1..=self.n()).map(|i| self.generator(i)).collect()
    }

    fn check(&self, x: &ExponentVector) {
        debug_assert!(x.len() == self.n() && (0..self.n()).all(|k| x.get(k) < self.p()));
    }

    /// Normal form of a word given as `(generator index, exponent)` pairs
    /// with 1-based indices. Exponents may be any integers.
    pub fn collect(&self, word: &[(usize, i64)]) -> Result<ExponentVector, PcError> {
        let mut v = self.identity();
        for &(g, e) in word {
            if g == 0 || g > self.n() {
                return Err(PcError::InvalidArgument(format!("generator index {g} out of range 1..={}", self.n())));
            }
            // the order of a_g divides p^g
            let m = (self.p() as u128).pow(g as u32);
            let k = e.unsigned_abs() as u128 % m;
            let part = if e >= 0 {
                self.generator_power(g, k)
            } else {
                self.col.power(&self.col.inverse(&self.generator(g)), k)
            };
            v = self.col.mul(&v, &part);
        }
        Ok(v)
    }

    /// `a_g^k = a_g^r (a_g^p)^q` with `k = qp + r`.
    fn generator_power(&self, g: usize, k: u128) -> ExponentVector {
        let p = self.p() as u128;
        let mut head = self.identity();
        head.set(g - 1, (k % p) as u32);
        if k < p {
            return head;
        }
        let tail = self.col.power(&self.pres.power_rhs(g), k / p);
        self.col.mul(&head, &tail)
    }

    pub fn multiply(&self, x: &ExponentVector, y: &ExponentVector) -> ExponentVector {
        self.check(x);
        self.check(y);
        self.col.mul(x, y)
    }

    pub fn inverse(&self, x: &ExponentVector) -> ExponentVector {
        self.check(x);
        self.col.inverse(x)
    }

    /// `x^k`; negative `k` powers the inverse.
    pub fn power(&self, x: &ExponentVector, k: i64) -> ExponentVector {
        self.check(x);
        if k < 0 {
            self.col.power(&self.col.inverse(x), k.unsigned_abs() as u128)
        } else {
            self.col.power(x, k as u128)
        }
    }

    pub fn power_u128(&self, x: &ExponentVector, k: u128) -> ExponentVector {
        self.col.power(x, k)
    }

    /// `[x, y] = (yx)^-1 (xy)`.
    pub fn commutator(&self, x: &ExponentVector, y: &ExponentVector) -> ExponentVector {
        let yx = self.multiply(y, x);
        let xy = self.multiply(x, y);
        self.col.mul(&self.col.inverse(&yx), &xy)
    }

    /// `g^-1 x g`.
    pub fn conjugate(&self, x: &ExponentVector, g: &ExponentVector) -> ExponentVector {
        let xg = self.multiply(x, g);
        self.col.mul(&self.col.inverse(g), &xg)
    }

    /// Least `k >= 1` with `x^k = 1`; always a power of `p`.
    pub fn element_order(&self, x: &ExponentVector) -> u128 {
        let mut k = 1u128;
        let mut y = *x;
        while !y.is_identity() {
            y = self.col.power(&y, self.p() as u128);
            k *= self.p() as u128;
        }
        k
    }

    /// All elements in lexicographic order of exponent vectors.
    pub fn enumerate_elements(&self, budget: u64) -> Result<ElementIter, PcError> {
        let needed = self.order();
        if needed > budget as u128 {
            return Err(PcError::Budget { needed, budget });
        }
        Ok(ElementIter { n: self.n(), p: self.p(), next: Some(self.identity()) })
    }

    /// Lexicographic rank of `x`, the index used by [`DenseGroup`].
    pub fn rank_of(&self, x: &ExponentVector) -> u64 {
        (0..self.n()).fold(0u64, |acc, k| acc * self.p() as u64 + x.get(k) as u64)
    }

    pub fn element_at(&self, mut r: u64) -> ExponentVector {
        let mut v = self.identity();
        for k in (0..self.n()).rev() {
            v.set(k, (r % self.p() as u64) as u32);
            r /= self.p() as u64;
        }
        v
    }
}

pub struct ElementIter {
    n: usize,
    p: u32,
    next: Option<ExponentVector>,
}

impl Iterator for ElementIter {
    type Item = ExponentVector;

    fn next(&mut self) -> Option<ExponentVector> {
        let cur = self.next?;
        let mut v = cur;
        let mut k = self.n;
        self.next = loop {
            if k == 0 {
                break None;
            }
            k -= 1;
            if v.get(k) + 1 < self.p {
                v.set(k, v.get(k) + 1);
                break Some(v);
            }
            v.set(k, 0);
        };
        Some(cur)
    }
}

/// Multiplication by table lookup on element ranks.
///
/// An element is split as `b * t` with `b` in the normal subgroup
/// `B = <a1..al>` and `t` a normal word in the remaining generators. Then
/// `(b1 t1)(b2 t2) = b1 (t1 b2 t1^-1) (t1 t2)` needs one product in `B`, one
/// conjugation of `B` and one product of top words.
pub struct DenseGroup {
    n: usize,
    pt: u32,
    pb: u32,
    bb: Vec<u32>,
    tt: Vec<u32>,
    conj: Vec<u32>,
    tinv: Vec<u32>,
    binv: Vec<u32>,
    gens: Vec<u32>,
    gen_invs: Vec<u32>,
}

impl DenseGroup {
    pub fn new(g: &PcGroup, budget: u64) -> Result<Self, PcError> {
        let needed = g.order();
        if needed > budget as u128 || needed > u32::MAX as u128 {
            return Err(PcError::Budget { needed, budget });
        }
        let n = g.n();
        let p = g.p();
        let l = n / 2;
        let h = n - l;
        let pb = p.pow(l as u32);
        let pt = p.pow(h as u32);
        let bottom = |r: u32| {
            let mut v = g.identity();
            let mut r = r;
            for k in (0..l).rev() {
                v.set(k, r % p);
                r /= p;
            }
            v
        };
        let top = |r: u32| {
            let mut v = g.identity();
            let mut r = r;
            for k in (l..n).rev() {
                v.set(k, r % p);
                r /= p;
            }
            v
        };
        let rank = |v: &ExponentVector| g.rank_of(v) as u32;
        let bvec: Vec<ExponentVector> = (0..pb).map(bottom).collect();
        let tvec: Vec<ExponentVector> = (0..pt).map(top).collect();
        // r = prefix(r) * a_k where a_k is the last generator r involves
        let last = |r: u32| {
            let mut k = 0;
            let mut scale = 1;
            while (r / scale).is_multiple_of(p) {
                k += 1;
                scale *= p;
            }
            (k, scale)
        };
        let (pbu, ptu) = (pb as usize, pt as usize);
        // right multiplication by one generator, then extend row by row
        let mut mb = vec![0u32; pbu * l];
        for (x, bx) in bvec.iter().enumerate() {
            for k in 0..l {
                mb[x * l + k] = rank(&g.col.mul(bx, &ExponentVector::generator(n, l - k))) / pt;
            }
        }
        let mut bb = vec![0u32; pbu * pbu];
        for x in 0..pbu {
            bb[x * pbu] = x as u32;
            for y in 1..pb {
                let (k, scale) = last(y);
                let prev = bb[x * pbu + (y - scale) as usize] as usize;
                bb[x * pbu + y as usize] = mb[prev * l + k];
            }
        }
        let mut mt = vec![0u32; ptu * h];
        for (x, tx) in tvec.iter().enumerate() {
            for k in 0..h {
                mt[x * h + k] = rank(&g.col.mul(tx, &ExponentVector::generator(n, n - k)));
            }
        }
        let mut tt = vec![0u32; ptu * ptu];
        for x in 0..ptu {
            tt[x * ptu] = x as u32;
            for y in 1..pt {
                let (k, scale) = last(y);
                let prev = tt[x * ptu + (y - scale) as usize];
                let (b, t) = ((prev / pt) as usize, (prev % pt) as usize);
                let m = mt[t * h + k];
                tt[x * ptu + y as usize] = bb[b * pbu + (m / pt) as usize] * pt + m % pt;
            }
        }
        let tinv: Vec<u32> = tvec.iter().map(|t| rank(&g.col.inverse(t))).collect();
        let binv: Vec<u32> = bvec.iter().map(|b| rank(&g.col.inverse(b)) / pt).collect();
        // conj[t][b] = t b t^-1, built from the images of a1..al
        let mut conj = vec![0u32; (pt as usize) * (pb as usize)];
        for (ti, t) in tvec.iter().enumerate() {
            let t_inv = g.col.inverse(t);
            let row = &mut conj[ti * pb as usize..(ti + 1) * pb as usize];
            let mut pw = vec![vec![0u32; p as usize]; l];
            for (k, pwk) in pw.iter_mut().enumerate() {
                let img = g.col.mul(&g.col.mul(t, &ExponentVector::generator(n, k + 1)), &t_inv);
                let img = rank(&img) / pt;
                for e in 1..p as usize {
                    pwk[e] = bb[pwk[e - 1] as usize * pb as usize + img as usize];
                }
            }
            for r in 1..pb {
                let mut k = l - 1;
                let mut scale = 1;
                while (r / scale) % p == 0 {
                    k -= 1;
                    scale *= p;
                }
                let e = (r / scale) % p;
                let prefix = r - e * scale;
                row[r as usize] = bb[row[prefix as usize] as usize * pb as usize + pw[k][e as usize] as usize];
            }
        }
        let gens: Vec<u32> = (1..=n).map(|i| rank(&g.generator(i))).collect();
        let gen_invs: Vec<u32> = (1..=n).map(|i| rank(&g.col.inverse(&g.generator(i)))).collect();
        Ok(DenseGroup { n, pt, pb, bb, tt, conj, tinv, binv, gens, gen_invs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.pt * self.pb
    }

    /// Rank of generator `a_i`, 1-based.
    pub fn generator(&self, i: usize) -> u32 {
        self.gens[i - 1]
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        let (pt, pb) = (self.pt as usize, self.pb as usize);
        let (b1, t1) = (x as usize / pt, x as usize % pt);
        let (b2, t2) = (y as usize / pt, y as usize % pt);
        let c = self.conj[t1 * pb + b2] as usize;
        let bt = self.tt[t1 * pt + t2] as usize;
        let (b3, t3) = (bt / pt, bt % pt);
        let b = self.bb[self.bb[b1 * pb + c] as usize * pb + b3] as usize;
        (b * pt + t3) as u32
    }

    #[inline]
    pub fn inverse(&self, x: u32) -> u32 {
        let pt = self.pt;
        // (b t)^-1 = t^-1 b^-1
        self.mul(self.tinv[(x % pt) as usize], self.binv[(x / pt) as usize] * pt)
    }

    /// `a_i^-1 x a_i`.
    #[inline]
    pub fn conjugate_by_generator(&self, x: u32, i: usize) -> u32 {
        self.mul(self.mul(self.gen_invs[i - 1], x), self.gens[i - 1])
    }

    pub fn power(&self, x: u32, mut k: u64) -> u32 {
        let mut acc = 0;
        let mut base = x;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }
}
