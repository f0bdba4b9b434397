//! Words in a free group `F_n`, Whitehead automorphisms, and Whitehead's
//! length-minimization algorithm.
//!
//! Generators are numbered `1..=n`. A word is stored freely reduced; cyclic
//! words are handled through [`Word::cyclically_reduced`] and
//! [`Word::canonical_cyclic`]. The two textual forms accepted by
//! [`Word::parse`] are the token form `"a1 A2 a1"` (capital letter = inverse)
//! and, for `n <= 26`, the compact form `"abA"`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Upper bound on the number of cyclic words visited while exploring one
/// equal-length plateau of the Whitehead graph.
pub const PLATEAU_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeGroupError {
    #[error("generator index {index} is out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("rank mismatch: automorphism has rank {auto_rank}, word has rank {word_rank}")]
    RankMismatch { auto_rank: usize, word_rank: usize },
    #[error("the empty word has no Whitehead minimization")]
    EmptyWord,
    #[error("rank must be positive")]
    ZeroRank,
    #[error("cannot parse word token {0:?}")]
    BadToken(String),
    #[error("not a Whitehead automorphism: {0}")]
    BadAutomorphism(String),
    #[error("equal-length exploration exceeded {PLATEAU_STATE_CAP} states")]
    PlateauOverflow,
}

/// A generator or its inverse. Ordered by index first, then `+ < -`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub index: usize,
    pub inverted: bool,
}

impl Letter {
    pub fn new(index: usize) -> Self {
        Letter { index, inverted: false }
    }

    pub fn inv(self) -> Self {
        Letter { index: self.index, inverted: !self.inverted }
    }

    fn is_inverse_of(self, other: Letter) -> bool {
        self.index == other.index && self.inverted != other.inverted
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.inverted { 'A' } else { 'a' };
        write!(f, "{}{}", c, self.index)
    }
}

impl FromStr for Letter {
    type Err = FreeGroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FreeGroupError::BadToken(s.to_string());
        let mut chars = s.chars();
        let inverted = match chars.next() {
            Some('a') => false,
            Some('A') => true,
            _ => return Err(bad()),
        };
        let index: usize = chars.as_str().parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(Letter { index, inverted })
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn reduce_into(out: &mut Vec<Letter>, letters: impl IntoIterator<Item = Letter>) {
    for l in letters {
        if out.last().is_some_and(|&last| last.is_inverse_of(l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
}

/// A freely reduced word in `F_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
    rank: usize,
}

/// Freely reduce a raw letter sequence.
pub fn free_reduce(raw: &[Letter], rank: usize) -> Result<Word, FreeGroupError> {
    if rank == 0 {
        return Err(FreeGroupError::ZeroRank);
    }
    if let Some(l) = raw.iter().find(|l| l.index == 0 || l.index > rank) {
        return Err(FreeGroupError::IndexOutOfRange { index: l.index, rank });
    }
    let mut letters = Vec::with_capacity(raw.len());
    reduce_into(&mut letters, raw.iter().copied());
    Ok(Word { letters, rank })
}

impl Word {
    pub fn identity(rank: usize) -> Self {
        Word { letters: Vec::new(), rank }
    }

    pub fn generator(index: usize, rank: usize) -> Result<Self, FreeGroupError> {
        free_reduce(&[Letter::new(index)], rank)
    }

    /// Parse either the token form (`"a1 A2"`) or the compact form (`"aB"`).
    ///
    /// When `rank` is `None` the rank is the largest generator index used
    /// (at least 1).
    pub fn parse(s: &str, rank: Option<usize>) -> Result<Self, FreeGroupError> {
        let s = s.trim();
        let tokens: Vec<&str> = s.split_whitespace().collect();
        let token_form = tokens
            .iter()
            .any(|t| t.len() > 1 && t[1..].chars().all(|c| c.is_ascii_digit()));
        let letters: Vec<Letter> = if token_form {
            tokens.iter().map(|t| t.parse()).collect::<Result<_, _>>()?
        } else {
            s.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    'a'..='z' => Ok(Letter::new(c as usize - 'a' as usize + 1)),
                    'A'..='Z' => Ok(Letter::new(c as usize - 'A' as usize + 1).inv()),
                    _ => Err(FreeGroupError::BadToken(c.to_string())),
                })
                .collect::<Result<_, _>>()?
        };
        let inferred = letters.iter().map(|l| l.index).max().unwrap_or(1);
        free_reduce(&letters, rank.unwrap_or(inferred))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
            rank: self.rank,
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        reduce_into(&mut letters, other.letters.iter().copied());
        Word { letters, rank: self.rank.max(other.rank) }
    }

    /// Strip matching inverse letters from both ends (conjugation).
    pub fn cyclically_reduced(&self) -> Word {
        let l = &self.letters;
        let mut lo = 0;
        let mut hi = l.len();
        while hi - lo >= 2 && l[lo].is_inverse_of(l[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        Word { letters: l[lo..hi].to_vec(), rank: self.rank }
    }

    pub fn cyclic_len(&self) -> usize {
        self.cyclically_reduced().len()
    }

    /// Lexicographically least rotation of the cyclic reduction.
    pub fn canonical_cyclic(&self) -> Word {
        let base = self.cyclically_reduced();
        let k = base.letters.len();
        let best = (0..k)
            .min_by(|&i, &j| {
                let a = base.letters[i..].iter().chain(&base.letters[..i]);
                let b = base.letters[j..].iter().chain(&base.letters[..j]);
                a.cmp(b)
            })
            .unwrap_or(0);
        let mut letters = base.letters[best..].to_vec();
        letters.extend_from_slice(&base.letters[..best]);
        Word { letters, rank: self.rank }
    }

    /// Image in the abelianization `Z^n`.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for l in &self.letters {
            sums[l.index - 1] += if l.inverted { -1 } else { 1 };
        }
        sums
    }

    /// Compact rendering `"abA"`; `None` when the rank exceeds 26.
    pub fn to_compact(&self) -> Option<String> {
        if self.rank > 26 {
            return None;
        }
        Some(
            self.letters
                .iter()
                .map(|l| {
                    let base = if l.inverted { b'A' } else { b'a' };
                    (base + (l.index - 1) as u8) as char
                })
                .collect(),
        )
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.letters {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// What a Type II automorphism does to one generator `y`, with multiplier `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    /// `y -> y`
    Fix,
    /// `y -> x^-1 y`
    Left,
    /// `y -> y x`
    Right,
    /// `y -> x^-1 y x`
    Conjugate,
}

const ACTIONS: [Action; 4] = [Action::Fix, Action::Left, Action::Right, Action::Conjugate];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kind {
    TypeI,
    TypeII,
}

/// A Whitehead automorphism of `F_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind")]
pub enum WhiteheadAuto {
    /// Type I: generator `i` goes to `images[i - 1]`, a signed permutation.
    #[serde(rename = "TypeI")]
    Permutation { images: Vec<Letter> },
    /// Type II: every generator other than the multiplier's is acted on by
    /// its tag; the multiplier's own generator is fixed.
    #[serde(rename = "TypeII")]
    Multiplier { multiplier: Letter, actions: Vec<Action> },
}

impl WhiteheadAuto {
    pub fn permutation(images: Vec<Letter>) -> Result<Self, FreeGroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for l in &images {
            if l.index == 0 || l.index > n || seen[l.index - 1] {
                return Err(FreeGroupError::BadAutomorphism(
                    "images do not form a signed permutation".into(),
                ));
            }
            seen[l.index - 1] = true;
        }
        Ok(WhiteheadAuto::Permutation { images })
    }

    pub fn multiplier(multiplier: Letter, actions: Vec<Action>) -> Result<Self, FreeGroupError> {
        let n = actions.len();
        if multiplier.index == 0 || multiplier.index > n {
            return Err(FreeGroupError::IndexOutOfRange { index: multiplier.index, rank: n });
        }
        if actions[multiplier.index - 1] != Action::Fix {
            return Err(FreeGroupError::BadAutomorphism(
                "the multiplier's own generator must be fixed".into(),
            ));
        }
        Ok(WhiteheadAuto::Multiplier { multiplier, actions })
    }

    pub fn kind(&self) -> Kind {
        match self {
            WhiteheadAuto::Permutation { .. } => Kind::TypeI,
            WhiteheadAuto::Multiplier { .. } => Kind::TypeII,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            WhiteheadAuto::Permutation { images } => images.len(),
            WhiteheadAuto::Multiplier { actions, .. } => actions.len(),
        }
    }

    /// Image of the generator `a_index`.
    pub fn image(&self, index: usize) -> Vec<Letter> {
        match self {
            WhiteheadAuto::Permutation { images } => vec![images[index - 1]],
            WhiteheadAuto::Multiplier { multiplier: x, actions } => {
                let y = Letter::new(index);
                match actions[index - 1] {
                    Action::Fix => vec![y],
                    Action::Left => vec![x.inv(), y],
                    Action::Right => vec![y, *x],
                    Action::Conjugate => vec![x.inv(), y, *x],
                }
            }
        }
    }

    pub fn inverse(&self) -> WhiteheadAuto {
        match self {
            WhiteheadAuto::Permutation { images } => {
                let mut inv = vec![Letter::new(1); images.len()];
                for (i, l) in images.iter().enumerate() {
                    inv[l.index - 1] = Letter { index: i + 1, inverted: l.inverted };
                }
                WhiteheadAuto::Permutation { images: inv }
            }
            WhiteheadAuto::Multiplier { multiplier, actions } => WhiteheadAuto::Multiplier {
                multiplier: multiplier.inv(),
                actions: actions.clone(),
            },
        }
    }

    fn is_identity(&self) -> bool {
        match self {
            WhiteheadAuto::Permutation { images } => images
                .iter()
                .enumerate()
                .all(|(i, l)| l.index == i + 1 && !l.inverted),
            WhiteheadAuto::Multiplier { actions, .. } => actions.iter().all(|a| *a == Action::Fix),
        }
    }

    fn apply_letters(&self, letters: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::with_capacity(letters.len() + 4);
        for l in letters {
            let img = self.image(l.index);
            if l.inverted {
                reduce_into(&mut out, img.iter().rev().map(|x| x.inv()));
            } else {
                reduce_into(&mut out, img);
            }
        }
        out
    }
}

impl fmt::Display for WhiteheadAuto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (1..=self.rank())
            .filter_map(|i| {
                let img = self.image(i);
                let fixed = img.len() == 1 && img[0] == Letter::new(i);
                (!fixed).then(|| {
                    let w: Vec<String> = img.iter().map(|l| l.to_string()).collect();
                    format!("a{} -> {}", i, w.join(" "))
                })
            })
            .collect();
        if parts.is_empty() {
            f.write_str("id")
        } else {
            f.write_str(&parts.join(", "))
        }
    }
}

/// Apply an automorphism to a word; the result is freely reduced.
pub fn apply_auto(auto: &WhiteheadAuto, w: &Word) -> Result<Word, FreeGroupError> {
    if auto.rank() != w.rank {
        return Err(FreeGroupError::RankMismatch { auto_rank: auto.rank(), word_rank: w.rank });
    }
    Ok(Word { letters: auto.apply_letters(&w.letters), rank: w.rank })
}

/// Every non-identity Whitehead automorphism of `F_n`, in a fixed order:
/// Type II first (by multiplier, then action tuple), then Type I.
pub fn whitehead_autos(rank: usize) -> Vec<WhiteheadAuto> {
    let mut out = Vec::new();
    for index in 1..=rank {
        for inverted in [false, true] {
            let x = Letter { index, inverted };
            let others = rank - 1;
            for code in 0..4usize.pow(others as u32) {
                let mut actions = Vec::with_capacity(rank);
                let mut c = code;
                for g in 1..=rank {
                    if g == index {
                        actions.push(Action::Fix);
                    } else {
                        actions.push(ACTIONS[c % 4]);
                        c /= 4;
                    }
                }
                let a = WhiteheadAuto::Multiplier { multiplier: x, actions };
                if !a.is_identity() {
                    out.push(a);
                }
            }
        }
    }
    for perm in permutations(rank) {
        for signs in 0..(1usize << rank) {
            let images = perm
                .iter()
                .enumerate()
                .map(|(i, &p)| Letter { index: p + 1, inverted: signs >> i & 1 == 1 })
                .collect();
            let a = WhiteheadAuto::Permutation { images };
            if !a.is_identity() {
                out.push(a);
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Minimization {
    /// Cyclic reduction of `trace` applied to the input word.
    pub min_word: Word,
    pub trace: Vec<WhiteheadAuto>,
    /// Number of equal-length cyclic words visited while confirming minimality.
    pub plateau_states: usize,
}

/// Whitehead's algorithm: reduce the cyclic length of `w` as far as any
/// sequence of automorphisms allows.
///
/// Strictly decreasing moves are taken greedily. At each local minimum the
/// whole equal-length component of the Whitehead graph is explored; if any
/// cyclic word there admits a decreasing move, descent resumes from it.
pub fn whitehead_minimize(w: &Word) -> Result<Minimization, FreeGroupError> {
    if w.is_empty() {
        return Err(FreeGroupError::EmptyWord);
    }
    let autos = whitehead_autos(w.rank);
    let mut trace: Vec<WhiteheadAuto> = Vec::new();
    let mut current = w.canonical_cyclic();
    let mut plateau_states = 0;

    while current.len() > 1 {
        if let Some((a, next)) = best_descent(&autos, &current) {
            trace.push(a.clone());
            current = next;
            continue;
        }
        match explore_plateau(&autos, &current)? {
            PlateauOutcome::Exhausted(visited) => {
                plateau_states += visited;
                break;
            }
            PlateauOutcome::Exit { path, visited } => {
                plateau_states += visited;
                for a in path {
                    current = cyclic_image(&a, &current);
                    trace.push(a);
                }
            }
        }
    }

    let mut min_word = w.clone();
    for a in &trace {
        min_word = apply_auto(a, &min_word)?;
    }
    let min_word = min_word.cyclically_reduced();
    debug_assert_eq!(min_word.len(), current.len());
    Ok(Minimization { min_word, trace, plateau_states })
}

fn cyclic_image(a: &WhiteheadAuto, w: &Word) -> Word {
    Word { letters: a.apply_letters(&w.letters), rank: w.rank }.canonical_cyclic()
}

fn best_descent<'a>(autos: &'a [WhiteheadAuto], w: &Word) -> Option<(&'a WhiteheadAuto, Word)> {
    let mut best: Option<(&WhiteheadAuto, Word)> = None;
    for a in autos {
        let img = cyclic_image(a, w);
        if img.len() < best.as_ref().map_or(w.len(), |(_, b)| b.len()) {
            best = Some((a, img));
        }
    }
    best
}

enum PlateauOutcome {
    Exhausted(usize),
    Exit { path: Vec<WhiteheadAuto>, visited: usize },
}

fn explore_plateau(autos: &[WhiteheadAuto], start: &Word) -> Result<PlateauOutcome, FreeGroupError> {
    let len = start.len();
    // state -> (parent, auto index used to reach it)
    let mut parent: HashMap<Vec<Letter>, Option<(Vec<Letter>, usize)>> = HashMap::new();
    parent.insert(start.letters.clone(), None);
    let mut queue = VecDeque::from([start.clone()]);

    while let Some(w) = queue.pop_front() {
        for (i, a) in autos.iter().enumerate() {
            let img = cyclic_image(a, &w);
            if img.len() < len {
                let mut path = vec![a.clone()];
                let mut key = w.letters.clone();
                while let Some(Some((prev, j))) = parent.get(&key) {
                    path.push(autos[*j].clone());
                    key = prev.clone();
                }
                path.reverse();
                return Ok(PlateauOutcome::Exit { path, visited: parent.len() });
            }
            if img.len() == len && !parent.contains_key(&img.letters) {
                if parent.len() >= PLATEAU_STATE_CAP {
                    return Err(FreeGroupError::PlateauOverflow);
                }
                parent.insert(img.letters.clone(), Some((w.letters.clone(), i)));
                queue.push_back(img);
            }
        }
    }
    Ok(PlateauOutcome::Exhausted(parent.len()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Primitivity {
    pub primitive: bool,
    /// Minimizing trace, present when the word is primitive.
    pub certificate: Option<Vec<WhiteheadAuto>>,
    pub min_word: Word,
}

/// A word is primitive (part of some basis) iff Whitehead minimization
/// brings its cyclic length down to 1.
pub fn is_primitive(w: &Word) -> Result<Primitivity, FreeGroupError> {
    let m = whitehead_minimize(w)?;
    let primitive = m.min_word.len() == 1;
    Ok(Primitivity {
        primitive,
        certificate: primitive.then_some(m.trace),
        min_word: m.min_word,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, Some(2)).unwrap()
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w("aAb"), w("b"));
        assert!(w("").is_empty());
        assert_eq!(w("abBa").to_string(), "a1 a1");
    }

    #[test]
    fn reduce_rejects_out_of_range() {
        let raw = [Letter::new(3)];
        assert_eq!(
            free_reduce(&raw, 2),
            Err(FreeGroupError::IndexOutOfRange { index: 3, rank: 2 })
        );
    }

    #[test]
    fn token_and_compact_forms_agree() {
        assert_eq!(Word::parse("a1 A2 a1", None).unwrap(), Word::parse("aBa", None).unwrap());
        assert_eq!(w("aB").to_compact().unwrap(), "aB");
        assert!(Word::parse("a0", None).is_err());
        assert!(Word::parse("a1 x", None).is_err());
    }

    #[test]
    fn apply_examples() {
        let invert_a = WhiteheadAuto::permutation(vec![Letter::new(1).inv(), Letter::new(2)]).unwrap();
        assert_eq!(apply_auto(&invert_a, &w("ab")).unwrap(), w("Ab"));

        let b = Letter::new(2);
        let a_to_ab = WhiteheadAuto::multiplier(b, vec![Action::Right, Action::Fix]).unwrap();
        assert_eq!(apply_auto(&a_to_ab, &w("a")).unwrap(), w("ab"));
        // a b^-1 -> (a b) b^-1 = a
        assert_eq!(apply_auto(&a_to_ab, &w("aB")).unwrap(), w("a"));
    }

    #[test]
    fn apply_rejects_rank_mismatch() {
        let a = WhiteheadAuto::permutation(vec![Letter::new(1)]).unwrap();
        assert!(matches!(apply_auto(&a, &w("ab")), Err(FreeGroupError::RankMismatch { .. })));
    }

    #[test]
    fn multiplier_must_fix_itself() {
        let x = Letter::new(1);
        assert!(WhiteheadAuto::multiplier(x, vec![Action::Right, Action::Fix]).is_err());
    }

    #[test]
    fn autos_count() {
        // rank 2: Type II 4 multipliers x 3 non-trivial tags; Type I 8 - 1.
        assert_eq!(whitehead_autos(2).len(), 12 + 7);
        assert_eq!(whitehead_autos(3).len(), 6 * 15 + 47);
    }

    #[test]
    fn canonical_rotation() {
        assert_eq!(w("bab").canonical_cyclic(), w("abb"));
        assert_eq!(w("Bab").canonical_cyclic(), w("a"));
        assert_eq!(w("BA").canonical_cyclic(), w("AB"));
    }

    #[test]
    fn minimize_examples() {
        let m = whitehead_minimize(&w("ab")).unwrap();
        assert_eq!(m.min_word.len(), 1);
        assert_eq!(whitehead_minimize(&w("abAB")).unwrap().min_word.len(), 4);
        assert_eq!(whitehead_minimize(&w("aa")).unwrap().min_word.len(), 2);
        assert_eq!(whitehead_minimize(&Word::identity(2)).unwrap_err(), FreeGroupError::EmptyWord);
    }

    #[test]
    fn trace_reproduces_min_word() {
        for s in ["abab", "aabAB", "abaBB", "aaabbAB"] {
            let word = w(s);
            let m = whitehead_minimize(&word).unwrap();
            let mut x = word.clone();
            for a in &m.trace {
                x = apply_auto(a, &x).unwrap();
            }
            assert_eq!(x.cyclically_reduced(), m.min_word);
        }
    }

    #[test]
    fn primitive_examples() {
        assert!(is_primitive(&w("a")).unwrap().primitive);
        let p = is_primitive(&w("ab")).unwrap();
        assert!(p.primitive && p.certificate.is_some());
        assert!(!is_primitive(&w("abAB")).unwrap().primitive);
        assert!(!is_primitive(&w("aa")).unwrap().primitive);
        assert!(is_primitive(&w("aab")).unwrap().primitive);
    }

    fn all_words(rank: usize, max_len: usize) -> Vec<Word> {
        let letters: Vec<Letter> = (1..=rank)
            .flat_map(|i| [Letter::new(i), Letter::new(i).inv()])
            .collect();
        let mut out = vec![Word::identity(rank)];
        let mut frontier = vec![Vec::<Letter>::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in &frontier {
                for &l in &letters {
                    if p.last().is_some_and(|&q| q.is_inverse_of(l)) {
                        continue;
                    }
                    let mut q = p.clone();
                    q.push(l);
                    out.push(Word { letters: q.clone(), rank });
                    next.push(q);
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn reduce_idempotent_and_shortening() {
        let letters: Vec<Letter> = (1..=3).flat_map(|i| [Letter::new(i), Letter::new(i).inv()]).collect();
        // every raw sequence of length <= 8 over F_3
        let mut raw = vec![Vec::new()];
        for _ in 0..8 {
            let mut next = Vec::new();
            for r in &raw {
                for &l in &letters {
                    let mut s: Vec<Letter> = r.clone();
                    s.push(l);
                    let once = free_reduce(&s, 3).unwrap();
                    assert!(once.len() <= s.len());
                    assert_eq!(free_reduce(once.letters(), 3).unwrap(), once);
                    next.push(s);
                }
            }
            raw = next;
        }
    }

    #[test]
    fn autos_round_trip_on_short_words() {
        for rank in 1..=3 {
            let max_len = if rank == 3 { 4 } else { 6 };
            let words = all_words(rank, max_len);
            for a in whitehead_autos(rank) {
                let inv = a.inverse();
                for word in &words {
                    let there = apply_auto(&a, word).unwrap();
                    assert_eq!(&apply_auto(&inv, &there).unwrap(), word, "{a} on {word}");
                }
            }
        }
    }

    #[test]
    fn primitive_implies_unimodular_abelianization() {
        for word in all_words(2, 6).into_iter().skip(1) {
            if is_primitive(&word).unwrap().primitive {
                let g = word.exponent_sums().into_iter().fold(0, gcd);
                assert_eq!(g, 1, "{word}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn letter(rank: usize) -> impl Strategy<Value = Letter> {
            (1..=rank, any::<bool>()).prop_map(|(index, inverted)| Letter { index, inverted })
        }

        proptest! {
            #[test]
            fn free_reduce_idempotent(raw in proptest::collection::vec(letter(3), 0..=8)) {
                let once = free_reduce(&raw, 3).unwrap();
                prop_assert!(once.len() <= raw.len());
                prop_assert_eq!(free_reduce(once.letters(), 3).unwrap(), once);
            }

            #[test]
            fn primitivity_is_aut_invariant(
                raw in proptest::collection::vec(letter(3), 1..=6),
                picks in proptest::collection::vec(0usize..1000, 1..4),
            ) {
                let word = free_reduce(&raw, 3).unwrap();
                prop_assume!(!word.is_empty());
                let autos = whitehead_autos(3);
                let mut image = word.clone();
                for p in picks {
                    image = apply_auto(&autos[p % autos.len()], &image).unwrap();
                }
                prop_assert_eq!(
                    is_primitive(&word).unwrap().primitive,
                    is_primitive(&image).unwrap().primitive
                );
            }
        }
    }
}
