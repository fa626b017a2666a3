//! Z2-graded vector spaces, parity reversion, unshuffles and Koszul signs.
//!
//! Every formula in the coderivation calculus moves graded letters past one
//! another; this module owns that sign discipline. Permutations are kept in
//! one-line notation acting on positions, so `perm = [2,0,1]` produces the
//! word `w2 w0 w1` from `w0 w1 w2`.

use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};

/// Parity of a homogeneous element: even (0) or odd (1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_usize(n: usize) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sign, +1 or -1, kept separate from `Scalar` so the hot sign arithmetic
/// stays on machine integers.
pub type Sign = i32;

/// A finite-dimensional Z2-graded vector space with a named, ordered basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpace {
    basis: Vec<(String, Parity)>,
}

impl GradedSpace {
    pub fn new(basis: Vec<(String, Parity)>) -> Result<GradedSpace> {
        let mut seen = std::collections::BTreeSet::new();
        for (name, _) in &basis {
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidInput(format!("duplicate basis name '{name}'")));
            }
        }
        Ok(GradedSpace { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn parity(&self, index: usize) -> Parity {
        self.basis[index].1
    }

    pub fn name(&self, index: usize) -> &str {
        &self.basis[index].0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|(n, _)| n == name)
    }

    pub fn basis(&self) -> &[(String, Parity)] {
        &self.basis
    }

    /// Same basis names, every parity flipped.
    pub fn parity_reversion(&self) -> GradedSpace {
        GradedSpace {
            basis: self.basis.iter().map(|(n, p)| (n.clone(), p.flip())).collect(),
        }
    }

    /// Number of even / odd basis elements.
    pub fn signature(&self) -> (usize, usize) {
        let even = self.basis.iter().filter(|(_, p)| *p == Parity::Even).count();
        (even, self.basis.len() - even)
    }
}

/// Koszul sign of the reordering `v_{perm[0]} ... v_{perm[n-1]}` of
/// `v_0 ... v_n-1`, for letters of the given parities: the product of
/// `(-1)^{|v_a||v_b|}` over the adjacent transpositions of any sorting of
/// the permuted word back to identity.
pub fn koszul_sign(perm: &[usize], parities: &[Parity]) -> Result<Sign> {
    if perm.len() != parities.len() {
        return Err(Error::DimensionMismatch(format!(
            "koszul_sign: permutation of length {} with {} parities",
            perm.len(),
            parities.len()
        )));
    }
    let mut word = perm.to_vec();
    let mut sign: Sign = 1;
    // Bubble sort; each adjacent swap moves letter a past letter b.
    for i in 0..word.len() {
        for j in (i + 1..word.len()).rev() {
            if word[j - 1] > word[j] {
                let (a, b) = (word[j - 1], word[j]);
                if parities[a].is_odd() && parities[b].is_odd() {
                    sign = -sign;
                }
                word.swap(j - 1, j);
            }
        }
    }
    Ok(sign)
}

/// Ordinary sign of a permutation, by inversion count.
pub fn sign_of_permutation(perm: &[usize]) -> Sign {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All unshuffles of type (k, l): permutations of k+l letters increasing on
/// the first k and on the last l positions, in lexicographic order of the
/// first block.
pub fn unshuffles(k: usize, l: usize) -> Vec<Vec<usize>> {
    let n = k + l;
    let mut out = Vec::new();
    // An unshuffle is determined by the k-subset taken by the first block.
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let chosen: std::collections::BTreeSet<usize> = subset.iter().copied().collect();
        let mut perm = subset.clone();
        perm.extend((0..n).filter(|i| !chosen.contains(i)));
        out.push(perm);
        // Next k-subset of {0..n-1} in lexicographic order.
        if k == 0 {
            break;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Which coalgebra a word lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoalgebraKind {
    /// S(W): words are commutative with Koszul signs.
    Symmetric,
    /// T(W): words keep their letter order.
    Tensor,
}

impl CoalgebraKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CoalgebraKind::Symmetric => "symmetric",
            CoalgebraKind::Tensor => "tensor",
        }
    }
}

/// A basis word over a graded space, stored canonically.
///
/// Symmetric words are kept in sorted index order; the sorting sign is
/// returned at construction and a repeated odd letter collapses the word to
/// zero. Tensor words are stored as given.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub kind: CoalgebraKind,
    pub letters: Vec<usize>,
}

impl Word {
    /// Canonicalize a letter sequence. Returns `None` for the zero word
    /// (symmetric word with a repeated odd letter), otherwise the canonical
    /// word and the Koszul sign incurred by sorting.
    pub fn canonical(
        kind: CoalgebraKind,
        letters: &[usize],
        space: &GradedSpace,
    ) -> Option<(Word, Sign)> {
        match kind {
            CoalgebraKind::Tensor => {
                Some((Word { kind, letters: letters.to_vec() }, 1))
            }
            CoalgebraKind::Symmetric => {
                let mut sign: Sign = 1;
                let mut sorted = letters.to_vec();
                // Insertion sort, tracking odd-odd transpositions.
                for i in 1..sorted.len() {
                    let mut j = i;
                    while j > 0 && sorted[j - 1] > sorted[j] {
                        let (a, b) = (sorted[j - 1], sorted[j]);
                        if space.parity(a).is_odd() && space.parity(b).is_odd() {
                            sign = -sign;
                        }
                        sorted.swap(j - 1, j);
                        j -= 1;
                    }
                }
                for pair in sorted.windows(2) {
                    if pair[0] == pair[1] && space.parity(pair[0]).is_odd() {
                        return None;
                    }
                }
                Some((Word { kind, letters: sorted }, sign))
            }
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn parity(&self, space: &GradedSpace) -> Parity {
        self.letters
            .iter()
            .fold(Parity::Even, |acc, &i| acc + space.parity(i))
    }

    pub fn display(&self, space: &GradedSpace) -> String {
        self.letters
            .iter()
            .map(|&i| space.name(i))
            .collect::<Vec<_>>()
            .join(match self.kind {
                CoalgebraKind::Symmetric => " ",
                CoalgebraKind::Tensor => ",",
            })
    }
}

/// All canonical words of the given length: nondecreasing index sequences
/// without repeated odd letters for the symmetric coalgebra, all sequences
/// for the tensor coalgebra. Lexicographic order.
pub fn enumerate_words(kind: CoalgebraKind, space: &GradedSpace, len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn rec(
        kind: CoalgebraKind,
        space: &GradedSpace,
        len: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Word>,
    ) {
        if current.len() == len {
            out.push(Word { kind, letters: current.clone() });
            return;
        }
        let from = match kind {
            CoalgebraKind::Symmetric => start,
            CoalgebraKind::Tensor => 0,
        };
        for i in from..space.dim() {
            if kind == CoalgebraKind::Symmetric
                && current.last() == Some(&i)
                && space.parity(i).is_odd()
            {
                continue;
            }
            current.push(i);
            rec(kind, space, len, i, current, out);
            current.pop();
        }
    }
    rec(kind, space, len, 0, &mut current, &mut out);
    out
}

/// Number of canonical words of the given length, without enumerating them.
pub fn count_words(kind: CoalgebraKind, space: &GradedSpace, len: usize) -> usize {
    match kind {
        CoalgebraKind::Tensor => space.dim().pow(len as u32),
        CoalgebraKind::Symmetric => {
            let (even, odd) = space.signature();
            // Choose a set of odd letters and a multiset of even letters.
            (0..=len.min(odd))
                .map(|j| binomial(odd, j) * multiset_count(even, len - j))
                .sum()
        }
    }
}

fn multiset_count(n: usize, k: usize) -> usize {
    if k == 0 {
        return 1;
    }
    if n == 0 {
        return 0;
    }
    binomial(n + k - 1, k)
}
