//! Finitely presented group engine: Todd-Coxeter coset enumeration,
//! low-index subgroup search with torsion exclusion, Reidemeister-Schreier
//! subgroup presentations, integer Smith normal form for first homology, and
//! cusp counting via peripheral orbits on coset tables.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::BigInt;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FpError {
    #[error("exceeded max_cosets budget of {0}")]
    Budget(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("data error: {0}")]
    Data(String),
}

/// A freely reduced word in the generators: letters (generator index, +-1).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<(usize, i8)>,
}

impl Word {
    /// Build a word, freely reducing adjacent inverse pairs.
    pub fn new(letters: impl IntoIterator<Item = (usize, i8)>) -> Self {
        let mut out: Vec<(usize, i8)> = Vec::new();
        for (g, e) in letters {
            assert!(e == 1 || e == -1, "letter exponents must be +-1");
            if let Some(&(lg, le)) = out.last() {
                if lg == g && le == -e {
                    out.pop();
                    continue;
                }
            }
            out.push((g, e));
        }
        Word { letters: out }
    }

    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn inverse(&self) -> Self {
        Word {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|&(g, e)| (g, -e))
                .collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Self {
        Word::new(self.letters.iter().chain(other.letters.iter()).copied())
    }

    /// Parse a word like `R1^-2 J R1^2 J^-1` against generator names.
    pub fn parse(s: &str, generators: &[String]) -> Result<Self, FpError> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let exp: i64 = e
                        .parse()
                        .map_err(|_| FpError::Parse(format!("bad exponent in `{tok}`")))?;
                    (n, exp)
                }
                None => (tok, 1),
            };
            let g = generators
                .iter()
                .position(|gn| gn == name)
                .ok_or_else(|| FpError::Parse(format!("unknown generator `{name}`")))?;
            let sign = if exp >= 0 { 1 } else { -1 };
            for _ in 0..exp.unsigned_abs() {
                letters.push((g, sign));
            }
        }
        Ok(Word::new(letters))
    }

    /// Render against generator names using caret exponents.
    pub fn display(&self, generators: &[String]) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let (g, e) = self.letters[i];
            let mut run = 0i64;
            while i < self.letters.len() && self.letters[i] == (g, e) {
                run += 1;
                i += 1;
            }
            let total = run * e as i64;
            if total == 1 {
                parts.push(generators[g].clone());
            } else {
                parts.push(format!("{}^{}", generators[g], total));
            }
        }
        parts.join(" ")
    }
}

/// A finite presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Self {
        let mut seen = BTreeSet::new();
        for g in &generators {
            assert!(seen.insert(g.clone()), "duplicate generator name {g}");
        }
        Presentation {
            generators,
            relators,
        }
    }
}

/// Presentation plus the auxiliary word data the census needs: torsion
/// conjugacy class representatives, peripheral (cusp stabilizer) generators,
/// and the intersection-subgroup generators.
#[derive(Debug, Clone)]
pub struct GroupData {
    pub presentation: Presentation,
    pub torsion_reps: Vec<Word>,
    pub peripheral: Vec<Word>,
    pub intersection: Vec<Word>,
}

impl GroupData {
    /// Parse the line-oriented data format with sections `generators:`,
    /// `relators:`, `torsion:`, `peripheral:`, `intersection:`.  A `#`
    /// starts a comment; words are one per line (or after the colon).
    pub fn parse(text: &str) -> Result<Self, FpError> {
        let mut generators: Vec<String> = Vec::new();
        let mut sections: BTreeMap<&'static str, Vec<String>> = BTreeMap::new();
        let mut current: Option<&'static str> = None;
        for raw in text.lines() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before.trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            let (head, rest) = match line.split_once(':') {
                Some((h, r)) => (h.trim(), Some(r.trim())),
                None => (line, None),
            };
            let known = ["generators", "relators", "torsion", "peripheral", "intersection"]
                .iter()
                .find(|&&k| k == head);
            if let (Some(&k), Some(rest)) = (known, rest) {
                current = Some(k);
                if !rest.is_empty() {
                    if k == "generators" {
                        generators.extend(rest.split_whitespace().map(String::from));
                    } else {
                        sections.entry(k).or_default().push(rest.to_string());
                    }
                }
                continue;
            }
            match current {
                Some("generators") => {
                    generators.extend(line.split_whitespace().map(String::from))
                }
                Some(k) => sections.entry(k).or_default().push(line.to_string()),
                None => {
                    return Err(FpError::Parse(format!(
                        "content before any section header: `{line}`"
                    )))
                }
            }
        }
        if generators.is_empty() {
            return Err(FpError::Parse("no generators declared".into()));
        }
        let parse_all = |key: &str| -> Result<Vec<Word>, FpError> {
            sections
                .get(key)
                .map(|v| v.iter().map(|s| Word::parse(s, &generators)).collect())
                .unwrap_or_else(|| Ok(Vec::new()))
        };
        Ok(GroupData {
            presentation: Presentation::new(generators.clone(), parse_all("relators")?),
            torsion_reps: parse_all("torsion")?,
            peripheral: parse_all("peripheral")?,
            intersection: parse_all("intersection")?,
        })
    }
}

/// A complete coset table: the permutation action of each generator on the
/// cosets 0..n of a finite-index subgroup (coset 0 = the subgroup).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    pub n: usize,
    /// forward[g][c] = image of coset c under generator g.
    pub forward: Vec<Vec<usize>>,
    /// backward[g][c] = image of coset c under the inverse of generator g.
    pub backward: Vec<Vec<usize>>,
    pub complete: bool,
}

impl CosetTable {
    pub fn apply(&self, c: usize, g: usize, e: i8) -> usize {
        if e > 0 {
            self.forward[g][c]
        } else {
            self.backward[g][c]
        }
    }

    pub fn apply_word(&self, mut c: usize, w: &Word) -> usize {
        for &(g, e) in w.letters() {
            c = self.apply(c, g, e);
        }
        c
    }

    /// Every generator must act as a bijection and every relator trivially.
    pub fn check_invariants(&self, pres: &Presentation) -> bool {
        for g in 0..pres.generators.len() {
            let mut seen = vec![false; self.n];
            for c in 0..self.n {
                let d = self.forward[g][c];
                if d >= self.n || seen[d] || self.backward[g][d] != c {
                    return false;
                }
                seen[d] = true;
            }
        }
        pres.relators
            .iter()
            .all(|r| (0..self.n).all(|c| self.apply_word(c, r) == c))
    }
}

// ---------------------------------------------------------------------------
// Todd-Coxeter (HLT with coincidence handling)
// ---------------------------------------------------------------------------

/// Default coset budget for enumerations.
pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

struct Enumerator {
    cols: usize,
    table: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    max_cosets: usize,
}

fn word_cols(w: &Word) -> Vec<usize> {
    w.letters()
        .iter()
        .map(|&(g, e)| if e > 0 { 2 * g } else { 2 * g + 1 })
        .collect()
}

fn inv_col(x: usize) -> usize {
    x ^ 1
}

impl Enumerator {
    fn new(ngens: usize, max_cosets: usize) -> Self {
        Enumerator {
            cols: 2 * ngens,
            table: vec![vec![None; 2 * ngens]],
            parent: vec![0],
            max_cosets,
        }
    }

    fn rep(&mut self, mut c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn define(&mut self, c: usize, x: usize) -> Result<usize, FpError> {
        if self.table.len() >= self.max_cosets {
            return Err(FpError::Budget(self.max_cosets));
        }
        let d = self.table.len();
        self.table.push(vec![None; self.cols]);
        self.parent.push(d);
        self.table[c][x] = Some(d);
        self.table[d][inv_col(x)] = Some(c);
        Ok(d)
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut VecDeque<usize>) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        queue.push_back(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = VecDeque::new();
        self.merge(a, b, &mut queue);
        while let Some(dead) = queue.pop_front() {
            for x in 0..self.cols {
                let Some(img) = self.table[dead][x] else {
                    continue;
                };
                self.table[dead][x] = None;
                let img = self.rep(img);
                let surv = self.rep(dead);
                match self.table[surv][x] {
                    Some(other) => {
                        let other = self.rep(other);
                        self.merge(other, img, &mut queue);
                    }
                    None => self.table[surv][x] = Some(img),
                }
                let surv = self.rep(dead);
                let img = self.rep(img);
                match self.table[img][inv_col(x)] {
                    Some(other) => {
                        let other = self.rep(other);
                        self.merge(other, surv, &mut queue);
                    }
                    None => self.table[img][inv_col(x)] = Some(surv),
                }
            }
        }
    }

    /// Scan the word at coset c, defining new cosets to complete it.
    fn scan_and_fill(&mut self, c: usize, cols: &[usize]) -> Result<(), FpError> {
        let mut i = 0usize;
        let mut j = cols.len();
        let mut f = self.rep(c);
        let mut b = f;
        loop {
            while i < j {
                let fx = self.table[f][cols[i]];
                match fx {
                    Some(d) => {
                        f = self.rep(d);
                        i += 1;
                    }
                    None => break,
                }
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i {
                let bx = self.table[b][inv_col(cols[j - 1])];
                match bx {
                    Some(d) => {
                        b = self.rep(d);
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j == i {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            if j == i + 1 {
                // deduction closing the scan
                self.table[f][cols[i]] = Some(b);
                self.table[b][inv_col(cols[i])] = Some(f);
                return Ok(());
            }
            self.define(f, cols[i])?;
        }
    }

    fn finish(mut self) -> CosetTable {
        let mut live = Vec::new();
        for c in 0..self.table.len() {
            if self.rep(c) == c {
                live.push(c);
            }
        }
        let mut index_of = vec![usize::MAX; self.table.len()];
        for (i, &c) in live.iter().enumerate() {
            index_of[c] = i;
        }
        let ngens = self.cols / 2;
        let n = live.len();
        let mut forward = vec![vec![0usize; n]; ngens];
        let mut backward = vec![vec![0usize; n]; ngens];
        let mut complete = true;
        for (i, &c) in live.iter().enumerate() {
            for g in 0..ngens {
                match self.table[c][2 * g] {
                    Some(d) => {
                        let d = self.rep(d);
                        forward[g][i] = index_of[d]
                    }
                    None => complete = false,
                }
                match self.table[c][2 * g + 1] {
                    Some(d) => {
                        let d = self.rep(d);
                        backward[g][i] = index_of[d]
                    }
                    None => complete = false,
                }
            }
        }
        CosetTable {
            n,
            forward,
            backward,
            complete,
        }
    }
}

/// Coset enumeration of the subgroup generated by `subgens` in the presented
/// group.  Returns a complete table or a budget error.
pub fn todd_coxeter(
    pres: &Presentation,
    subgens: &[Word],
    max_cosets: usize,
) -> Result<CosetTable, FpError> {
    let mut e = Enumerator::new(pres.generators.len(), max_cosets.max(1));
    let relator_cols: Vec<Vec<usize>> = pres.relators.iter().map(word_cols).collect();
    let subgen_cols: Vec<Vec<usize>> = subgens.iter().map(word_cols).collect();
    for sc in &subgen_cols {
        e.scan_and_fill(0, sc)?;
    }
    let mut c = 0usize;
    while c < e.table.len() {
        if e.rep(c) != c {
            c += 1;
            continue;
        }
        for rc in &relator_cols {
            e.scan_and_fill(c, rc)?;
            if e.rep(c) != c {
                break;
            }
        }
        if e.rep(c) == c {
            for x in 0..e.cols {
                if e.table[c][x].is_none() {
                    e.define(c, x)?;
                }
            }
        }
        c += 1;
    }
    let t = e.finish();
    debug_assert!(t.complete);
    Ok(t)
}

// ---------------------------------------------------------------------------
// Low-index subgroup search
// ---------------------------------------------------------------------------

struct LowIndex<'a> {
    cols: usize,
    target: usize,
    relators: &'a [Vec<usize>],
    exclude: &'a [Vec<usize>],
    results: BTreeSet<Vec<usize>>,
}

#[derive(Clone)]
struct Partial {
    rows: Vec<Vec<Option<usize>>>,
}

impl Partial {
    /// Scan word at coset c; Ok(changed) or Err(()) on contradiction.
    fn scan(&mut self, c: usize, cols: &[usize]) -> Result<bool, ()> {
        let mut i = 0usize;
        let mut j = cols.len();
        let mut f = c;
        let mut b = c;
        while i < j {
            match self.rows[f][cols[i]] {
                Some(d) => {
                    f = d;
                    i += 1;
                }
                None => break,
            }
        }
        if i == j {
            return if f == b { Ok(false) } else { Err(()) };
        }
        while j > i {
            match self.rows[b][inv_col(cols[j - 1])] {
                Some(d) => {
                    b = d;
                    j -= 1;
                }
                None => break,
            }
        }
        if j == i {
            return if f == b { Ok(false) } else { Err(()) };
        }
        if j == i + 1 {
            if let Some(existing) = self.rows[f][cols[i]] {
                return if existing == b { Ok(false) } else { Err(()) };
            }
            if let Some(existing) = self.rows[b][inv_col(cols[i])] {
                return if existing == f { Ok(false) } else { Err(()) };
            }
            self.rows[f][cols[i]] = Some(b);
            self.rows[b][inv_col(cols[i])] = Some(f);
            return Ok(true);
        }
        Ok(false)
    }

    /// A fully defined trace of an excluded word fixing a coset is fatal.
    fn violates_exclusion(&self, exclude: &[Vec<usize>]) -> bool {
        for w in exclude {
            'coset: for c in 0..self.rows.len() {
                let mut cur = c;
                for &x in w {
                    match self.rows[cur][x] {
                        Some(d) => cur = d,
                        None => continue 'coset,
                    }
                }
                if cur == c {
                    return true;
                }
            }
        }
        false
    }
}

impl<'a> LowIndex<'a> {
    fn propagate(&self, p: &mut Partial) -> Result<(), ()> {
        loop {
            let mut changed = false;
            for c in 0..p.rows.len() {
                for rc in self.relators {
                    changed |= p.scan(c, rc)?;
                }
            }
            if !changed {
                break;
            }
        }
        if p.violates_exclusion(self.exclude) {
            return Err(());
        }
        Ok(())
    }

    fn search(&mut self, p: &mut Partial) {
        if self.propagate(p).is_err() {
            return;
        }
        // first undefined slot, row-major
        let mut slot = None;
        'outer: for c in 0..p.rows.len() {
            for x in 0..self.cols {
                if p.rows[c][x].is_none() {
                    slot = Some((c, x));
                    break 'outer;
                }
            }
        }
        let Some((c, x)) = slot else {
            if p.rows.len() == self.target {
                self.results.insert(flatten(&p.rows));
            }
            return;
        };
        for d in 0..p.rows.len() {
            if p.rows[d][inv_col(x)].is_some() {
                continue;
            }
            let mut q = p.clone();
            q.rows[c][x] = Some(d);
            q.rows[d][inv_col(x)] = Some(c);
            self.search(&mut q);
        }
        if p.rows.len() < self.target {
            let d = p.rows.len();
            let mut q = p.clone();
            q.rows.push(vec![None; self.cols]);
            q.rows[c][x] = Some(d);
            q.rows[d][inv_col(x)] = Some(c);
            self.search(&mut q);
        }
    }
}

fn flatten(rows: &[Vec<Option<usize>>]) -> Vec<usize> {
    rows.iter()
        .flat_map(|r| r.iter().map(|e| e.expect("complete")))
        .collect()
}

/// Canonical key of a complete table under conjugacy: the minimum, over all
/// base cosets, of the table relabeled by breadth-first discovery order.
fn canonical_key(flat: &[usize], cols: usize) -> Vec<usize> {
    let n = flat.len() / cols;
    let mut best: Option<Vec<usize>> = None;
    for base in 0..n {
        let mut label = vec![usize::MAX; n];
        let mut order = vec![base];
        label[base] = 0;
        let mut qi = 0;
        while qi < order.len() {
            let c = order[qi];
            qi += 1;
            for x in 0..cols {
                let d = flat[c * cols + x];
                if label[d] == usize::MAX {
                    label[d] = order.len();
                    order.push(d);
                }
            }
        }
        let mut key: Vec<usize> = Vec::with_capacity(flat.len());
        for &c in &order {
            for x in 0..cols {
                key.push(label[flat[c * cols + x]]);
            }
        }
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    best.expect("nonempty table")
}

fn table_from_flat(flat: &[usize], ngens: usize) -> CosetTable {
    let cols = 2 * ngens;
    let n = flat.len() / cols;
    let mut forward = vec![vec![0usize; n]; ngens];
    let mut backward = vec![vec![0usize; n]; ngens];
    for c in 0..n {
        for g in 0..ngens {
            forward[g][c] = flat[c * cols + 2 * g];
            backward[g][c] = flat[c * cols + 2 * g + 1];
        }
    }
    CosetTable {
        n,
        forward,
        backward,
        complete: true,
    }
}

/// All subgroups of index exactly `n`, one per conjugacy class, such that no
/// excluded word fixes a coset of the subgroup.  Deterministic canonical
/// order.
pub fn low_index_tables(
    pres: &Presentation,
    n: usize,
    exclude: &[Word],
) -> Result<Vec<CosetTable>, FpError> {
    if n == 0 {
        return Err(FpError::Data("index must be >= 1".into()));
    }
    let relators: Vec<Vec<usize>> = pres.relators.iter().map(word_cols).collect();
    let exclude_cols: Vec<Vec<usize>> = exclude.iter().map(word_cols).collect();
    let ngens = pres.generators.len();
    let mut li = LowIndex {
        cols: 2 * ngens,
        target: n,
        relators: &relators,
        exclude: &exclude_cols,
        results: BTreeSet::new(),
    };
    let mut start = Partial {
        rows: vec![vec![None; 2 * ngens]],
    };
    li.search(&mut start);
    // conjugacy dedup via canonical relabeling
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut keyed: Vec<(Vec<usize>, Vec<usize>)> = li
        .results
        .iter()
        .map(|flat| (canonical_key(flat, 2 * ngens), flat.clone()))
        .collect();
    keyed.sort();
    for (key, flat) in keyed {
        if seen.insert(key) {
            out.push(table_from_flat(&flat, ngens));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Reidemeister-Schreier
// ---------------------------------------------------------------------------

/// Which Schreier transversal to build; the two choices must give the same
/// homology (transversal independence).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transversal {
    BfsForward,
    BfsReversedGenerators,
}

/// Subgroup presentation on Schreier generators, plus each Schreier
/// generator expressed as a word in the parent group's generators.
#[derive(Debug, Clone)]
pub struct SchreierPresentation {
    pub presentation: Presentation,
    pub generator_words: Vec<Word>,
}

/// Rewrite the subgroup of a complete coset table as a presentation on
/// Schreier generators.
pub fn reidemeister_schreier(
    pres: &Presentation,
    table: &CosetTable,
    transversal: Transversal,
) -> SchreierPresentation {
    let ngens = pres.generators.len();
    let n = table.n;
    // build the Schreier transversal by BFS
    let gen_order: Vec<usize> = match transversal {
        Transversal::BfsForward => (0..ngens).collect(),
        Transversal::BfsReversedGenerators => (0..ngens).rev().collect(),
    };
    let mut trans: Vec<Option<Word>> = vec![None; n];
    trans[0] = Some(Word::identity());
    let mut tree_edge = vec![vec![false; n]; ngens]; // tree_edge[g][c]: c --g--> image
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for &g in &gen_order {
            for e in [1i8, -1] {
                let d = table.apply(c, g, e);
                if trans[d].is_none() {
                    let t = trans[c]
                        .clone()
                        .expect("visited")
                        .concat(&Word::new([(g, e)]));
                    trans[d] = Some(t);
                    if e > 0 {
                        tree_edge[g][c] = true;
                    } else {
                        tree_edge[g][d] = true;
                    }
                    queue.push_back(d);
                }
            }
        }
    }
    let trans: Vec<Word> = trans.into_iter().map(|t| t.expect("transitive")).collect();
    // Schreier generators: one per non-tree (coset, generator) edge
    let mut gen_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut generator_words = Vec::new();
    let mut names = Vec::new();
    for g in 0..ngens {
        for c in 0..n {
            if !tree_edge[g][c] {
                let d = table.forward[g][c];
                let w = trans[c]
                    .concat(&Word::new([(g, 1)]))
                    .concat(&trans[d].inverse());
                gen_index.insert((c, g), names.len());
                names.push(format!("x{}", names.len()));
                generator_words.push(w);
            }
        }
    }
    // rewrite a parent word traced from a coset into Schreier generators
    let rewrite = |start: usize, w: &Word| -> Word {
        let mut c = start;
        let mut letters = Vec::new();
        for &(g, e) in w.letters() {
            if e > 0 {
                if let Some(&s) = gen_index.get(&(c, g)) {
                    letters.push((s, 1i8));
                }
                c = table.forward[g][c];
            } else {
                let d = table.backward[g][c];
                if let Some(&s) = gen_index.get(&(d, g)) {
                    letters.push((s, -1i8));
                }
                c = d;
            }
        }
        debug_assert_eq!(c, start, "relators and subgroup words must close");
        Word::new(letters)
    };
    let mut relators = Vec::new();
    for r in &pres.relators {
        for c in 0..n {
            let w = rewrite(c, r);
            if !w.is_empty() {
                relators.push(w);
            }
        }
    }
    SchreierPresentation {
        presentation: Presentation::new(names, relators),
        generator_words,
    }
}

// ---------------------------------------------------------------------------
// Smith normal form and homology
// ---------------------------------------------------------------------------

/// Smith normal form of an integer matrix: (free rank of the cokernel on the
/// columns, divisor chain d1 | d2 | ... including trivial 1s).
pub fn smith_normal_form(matrix: &[Vec<BigInt>]) -> (usize, Vec<BigInt>) {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 {
        return (cols, Vec::new());
    }
    let mut m: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut t = 0usize;
    while t < rows && t < cols {
        // locate a nonzero entry of minimal absolute value in the submatrix
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && pivot
                        .map(|(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break;
        };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        // clear row and column t
        loop {
            let mut dirty = false;
            for i in (t + 1)..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&m[i][t], &m[t][t]);
                for j in t..cols {
                    let v = &m[i][j] - &q * &m[t][j];
                    m[i][j] = v;
                }
                if !m[i][t].is_zero() {
                    m.swap(i, t);
                    dirty = true;
                }
            }
            for j in (t + 1)..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&m[t][j], &m[t][t]);
                for row in m.iter_mut() {
                    let v = &row[j] - &q * &row[t];
                    row[j] = v;
                }
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if !dirty
                && (t + 1..rows).all(|i| m[i][t].is_zero())
                && (t + 1..cols).all(|j| m[t][j].is_zero())
            {
                break;
            }
        }
        // enforce the divisibility chain: the pivot must divide everything
        // in the remaining submatrix
        let mut fixup = None;
        'find: for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if !(&m[i][j] % &m[t][t]).is_zero() {
                    fixup = Some(i);
                    break 'find;
                }
            }
        }
        match fixup {
            Some(i) => {
                for j in t..cols {
                    let v = &m[t][j] + &m[i][j];
                    m[t][j] = v;
                }
            }
            None => {
                if m[t][t].is_negative() {
                    let v = -m[t][t].clone();
                    m[t][t] = v;
                }
                t += 1;
            }
        }
    }
    let divisors: Vec<BigInt> = (0..t).map(|i| m[i][i].clone()).collect();
    (cols - t, divisors)
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // quotient rounding toward nearest so remainders shrink
    let two = BigInt::from(2);
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if &r.abs() * &two > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Abelian invariants: free rank plus nontrivial torsion divisor chain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl fmt::Display for AbelianInvariants {
    /// Primary decomposition rendering, e.g. `(Z/3)^2 + Z/9 + Z^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut primary: BTreeMap<u64, usize> = BTreeMap::new();
        for &d in &self.torsion {
            let mut n = d;
            let mut p = 2u64;
            while p * p <= n {
                if n % p == 0 {
                    let mut q = 1u64;
                    while n % p == 0 {
                        q *= p;
                        n /= p;
                    }
                    *primary.entry(q).or_default() += 1;
                }
                p += 1;
            }
            if n > 1 {
                *primary.entry(n).or_default() += 1;
            }
        }
        let mut parts = Vec::new();
        for (q, mult) in primary {
            if mult == 1 {
                parts.push(format!("Z/{q}"));
            } else {
                parts.push(format!("(Z/{q})^{mult}"));
            }
        }
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// First homology (abelianization) of the subgroup given by a complete coset
/// table, via Reidemeister-Schreier and Smith normal form.
pub fn homology(
    pres: &Presentation,
    table: &CosetTable,
    transversal: Transversal,
) -> AbelianInvariants {
    let sp = reidemeister_schreier(pres, table, transversal);
    let ngens = sp.presentation.generators.len();
    let matrix: Vec<Vec<BigInt>> = sp
        .presentation
        .relators
        .iter()
        .map(|r| {
            let mut row = vec![BigInt::zero(); ngens];
            for &(g, e) in r.letters() {
                row[g] += BigInt::from(e);
            }
            row
        })
        .collect();
    let (free_rank, divisors) = smith_normal_form(&matrix);
    AbelianInvariants {
        free_rank,
        torsion: divisors
            .into_iter()
            .filter(|d| *d > BigInt::from(1))
            .map(|d| d.to_u64().expect("small torsion divisor"))
            .collect(),
    }
}

/// Number of orbits of the peripheral words acting on the cosets: the cusp
/// count of the cover.
pub fn cusp_count(peripheral: &[Word], table: &CosetTable) -> Result<usize, FpError> {
    if peripheral.is_empty() {
        return Err(FpError::Data("no peripheral words available".into()));
    }
    let mut parent: Vec<usize> = (0..table.n).collect();
    fn find(parent: &mut Vec<usize>, mut c: usize) -> usize {
        while parent[c] != c {
            parent[c] = parent[parent[c]];
            c = parent[c];
        }
        c
    }
    for w in peripheral {
        for c in 0..table.n {
            let d = table.apply_word(c, w);
            let (rc, rd) = (find(&mut parent, c), find(&mut parent, d));
            if rc != rd {
                parent[rc.max(rd)] = rc.min(rd);
            }
        }
    }
    Ok((0..table.n)
        .filter(|&c| find(&mut parent, c) == c)
        .count())
}

// ---------------------------------------------------------------------------
// Subgroup records and the staged census search
// ---------------------------------------------------------------------------

/// One subgroup found by the search, with its census invariants.
#[derive(Debug, Clone)]
pub struct SubgroupRecord {
    /// Schreier generators of the subgroup as words in the parent group.
    pub generators: Vec<Word>,
    pub index: usize,
    pub abelian_invariants: AbelianInvariants,
    pub cusp_count: Option<usize>,
    pub torsion_free: bool,
    pub table: CosetTable,
}

/// A torsion representative has a conjugate in the subgroup iff it fixes a
/// coset of the subgroup.
pub fn is_torsion_free(torsion_reps: &[Word], table: &CosetTable) -> bool {
    torsion_reps
        .iter()
        .all(|w| (0..table.n).all(|c| table.apply_word(c, w) != c))
}

/// Assemble the invariants of the subgroup given by a table over the data's
/// presentation.
pub fn subgroup_record(g: &GroupData, table: &CosetTable) -> SubgroupRecord {
    let sp = reidemeister_schreier(&g.presentation, table, Transversal::BfsForward);
    let inv = homology(&g.presentation, table, Transversal::BfsForward);
    let cusps = if g.peripheral.is_empty() {
        None
    } else {
        Some(cusp_count(&g.peripheral, table).expect("peripheral nonempty"))
    };
    SubgroupRecord {
        generators: sp.generator_words,
        index: table.n,
        abelian_invariants: inv,
        cusp_count: cusps,
        torsion_free: is_torsion_free(&g.torsion_reps, table),
        table: table.clone(),
    }
}

/// Subgroups of index exactly n (up to conjugacy) with no conjugate of an
/// excluded word, as full records.
pub fn low_index_subgroups(
    g: &GroupData,
    n: usize,
    exclude: &[Word],
) -> Result<Vec<SubgroupRecord>, FpError> {
    let tables = low_index_tables(&g.presentation, n, exclude)?;
    Ok(tables.iter().map(|t| subgroup_record(g, t)).collect())
}

/// The designated index-4 subgroup (intersection of the two maximal
/// lattices) from the data file.
pub fn intersection_subgroup(g: &GroupData) -> Result<SubgroupRecord, FpError> {
    if g.intersection.is_empty() {
        return Err(FpError::Data("no intersection words in data file".into()));
    }
    let table = todd_coxeter(&g.presentation, &g.intersection, DEFAULT_MAX_COSETS)?;
    if table.n != 4 {
        return Err(FpError::Data(format!(
            "intersection words generate index {} (expected 4)",
            table.n
        )));
    }
    Ok(subgroup_record(g, &table))
}

/// Number of subgroup classes (up to conjugacy) of each index `2..=maxn` in
/// the subgroup given by `table`, computed on its Reidemeister-Schreier
/// presentation.  This is an abstract-isomorphism invariant of the subgroup,
/// sharp enough to separate the census manifolds that share first homology
/// and cusp count.
pub fn low_index_profile(
    g: &GroupData,
    table: &CosetTable,
    maxn: usize,
) -> Result<Vec<usize>, FpError> {
    let sp = reidemeister_schreier(&g.presentation, table, Transversal::BfsForward);
    (2..=maxn)
        .map(|n| Ok(low_index_tables(&sp.presentation, n, &[])?.len()))
        .collect()
}

/// Staged search: enumerate index-`inner` subgroups of the designated
/// index-4 subgroup, recompute each composed subgroup from the top, and
/// (optionally) keep only the torsion-free ones.  Records are relative to
/// the top group and deduplicated up to conjugacy there.
///
/// With `exclude_torsion` set the output is a census of manifold quotients.
/// A manifold group can embed in the top group in more than one conjugacy
/// class (for instance, two embeddings swapped by an isometry of the ambient
/// space that does not normalize the top group), so torsion-free records
/// agreeing in every computed isomorphism invariant -- first homology, cusp
/// count, and the low-index subgroup profile up to index 4 -- are counted
/// once.
pub fn staged_search(
    g: &GroupData,
    inner: usize,
    exclude_torsion: bool,
) -> Result<Vec<SubgroupRecord>, FpError> {
    let base = intersection_subgroup(g)?;
    let sp = reidemeister_schreier(&g.presentation, &base.table, Transversal::BfsForward);
    let inner_tables = low_index_tables(&sp.presentation, inner, &[])?;
    let mut seen = BTreeSet::new();
    let mut records = Vec::new();
    for it in &inner_tables {
        // Schreier generators of the inner subgroup, first in the base
        // subgroup's generators, then substituted down to the top group
        let inner_sp = reidemeister_schreier(&sp.presentation, it, Transversal::BfsForward);
        let top_words: Vec<Word> = inner_sp
            .generator_words
            .iter()
            .map(|w| {
                let mut out = Word::identity();
                for &(s, e) in w.letters() {
                    let piece = if e > 0 {
                        sp.generator_words[s].clone()
                    } else {
                        sp.generator_words[s].inverse()
                    };
                    out = out.concat(&piece);
                }
                out
            })
            .collect();
        let table = todd_coxeter(&g.presentation, &top_words, DEFAULT_MAX_COSETS)?;
        if table.n != base.index * inner {
            return Err(FpError::Data(format!(
                "composed subgroup has index {} (expected {})",
                table.n,
                base.index * inner
            )));
        }
        if exclude_torsion && !is_torsion_free(&g.torsion_reps, &table) {
            continue;
        }
        // dedup by conjugacy in the top group
        let ngens = g.presentation.generators.len();
        let mut flat: Vec<usize> = Vec::with_capacity(table.n * 2 * ngens);
        for c in 0..table.n {
            for gen in 0..ngens {
                flat.push(table.forward[gen][c]);
                flat.push(table.backward[gen][c]);
            }
        }
        let key = canonical_key(&flat, 2 * g.presentation.generators.len());
        if seen.insert(key) {
            records.push(subgroup_record(g, &table));
        }
    }
    // canonical order for determinism
    records.sort_by(|a, b| {
        (a.index, &a.abelian_invariants, a.cusp_count)
            .cmp(&(b.index, &b.abelian_invariants, b.cusp_count))
    });
    if exclude_torsion {
        records = merge_equivalent_records(g, records)?;
    }
    Ok(records)
}

/// Merge census records that agree in every computed isomorphism invariant.
/// Records are first grouped by the cheap invariants (index, homology, cusp
/// count); within a group of size > 1 the low-index subgroup profile decides,
/// and records with identical profiles are counted once.
fn merge_equivalent_records(
    g: &GroupData,
    records: Vec<SubgroupRecord>,
) -> Result<Vec<SubgroupRecord>, FpError> {
    let mut out: Vec<SubgroupRecord> = Vec::with_capacity(records.len());
    let mut kept_profiles: Vec<Option<Vec<usize>>> = Vec::new();
    for r in records {
        let key = |s: &SubgroupRecord| {
            (
                s.index,
                s.abelian_invariants.clone(),
                s.cusp_count,
            )
        };
        let rkey = key(&r);
        let mut profile: Option<Vec<usize>> = None;
        let mut duplicate = false;
        for (i, kept) in out.iter().enumerate() {
            if key(kept) != rkey {
                continue;
            }
            if kept_profiles[i].is_none() {
                kept_profiles[i] = Some(low_index_profile(g, &kept.table, 4)?);
            }
            if profile.is_none() {
                profile = Some(low_index_profile(g, &r.table, 4)?);
            }
            if kept_profiles[i] == profile {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            out.push(r);
            kept_profiles.push(profile);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(gens: &[&str], rels: &[&str]) -> Presentation {
        let generators: Vec<String> = gens.iter().map(|s| s.to_string()).collect();
        let relators = rels
            .iter()
            .map(|r| Word::parse(r, &generators).unwrap())
            .collect();
        Presentation::new(generators, relators)
    }

    #[test]
    fn word_reduction_and_parse() {
        let gens = vec!["a".to_string(), "b".to_string()];
        let w = Word::parse("a b^-1 b a^-1", &gens).unwrap();
        assert!(w.is_empty());
        let w = Word::parse("a^3 b^-2", &gens).unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(w.display(&gens), "a^3 b^-2");
        assert_eq!(w.concat(&w.inverse()), Word::identity());
        assert!(Word::parse("c", &gens).is_err());
        assert!(Word::parse("a^x", &gens).is_err());
    }

    #[test]
    fn todd_coxeter_cyclic() {
        let p = pres(&["a"], &["a^3"]);
        let t = todd_coxeter(&p, &[], 100).unwrap();
        assert_eq!(t.n, 3);
        assert!(t.check_invariants(&p));
    }

    #[test]
    fn todd_coxeter_known_orders() {
        // S3
        let p = pres(&["a", "b"], &["a^2", "b^3", "a b a b"]);
        assert_eq!(todd_coxeter(&p, &[], 1000).unwrap().n, 6);
        // A4
        let p = pres(&["a", "b"], &["a^2", "b^3", "a b a b a b"]);
        assert_eq!(todd_coxeter(&p, &[], 1000).unwrap().n, 12);
        // quaternion group of order 8
        let p = pres(&["a", "b"], &["a^4", "a^2 b^-2", "b^-1 a b a"]);
        assert_eq!(todd_coxeter(&p, &[], 1000).unwrap().n, 8);
    }

    #[test]
    fn todd_coxeter_whole_group_subgroup() {
        let p = pres(&["a", "b"], &["a^2", "b^3", "a b a b"]);
        let gens = vec![
            Word::parse("a", &p.generators).unwrap(),
            Word::parse("b", &p.generators).unwrap(),
        ];
        assert_eq!(todd_coxeter(&p, &gens, 1000).unwrap().n, 1);
    }

    #[test]
    fn todd_coxeter_budget() {
        // free group of rank 2 on the trivial subgroup never closes
        let p = pres(&["a", "b"], &[]);
        assert_eq!(todd_coxeter(&p, &[], 50), Err(FpError::Budget(50)));
    }

    #[test]
    fn low_index_free_group() {
        let p = pres(&["a", "b"], &[]);
        assert_eq!(low_index_tables(&p, 2, &[]).unwrap().len(), 3);
        // transitive pair-of-permutation classes on 3 points: 7
        assert_eq!(low_index_tables(&p, 3, &[]).unwrap().len(), 7);
    }

    #[test]
    fn low_index_conjugacy_counts_match_bruteforce() {
        // count transitive pairs of permutations up to simultaneous
        // conjugation, the classes of index-n subgroups of F2
        fn perms(n: usize) -> Vec<Vec<usize>> {
            let mut out = vec![vec![]];
            for _ in 0..n {
                let mut next = Vec::new();
                for p in out {
                    for v in 0..n {
                        if !p.contains(&v) {
                            let mut q = p.clone();
                            q.push(v);
                            next.push(q);
                        }
                    }
                }
                out = next;
            }
            out
        }
        fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
            (0..p.len()).map(|i| q[p[i]]).collect()
        }
        fn inverse(p: &[usize]) -> Vec<usize> {
            let mut inv = vec![0; p.len()];
            for (i, &v) in p.iter().enumerate() {
                inv[v] = i;
            }
            inv
        }
        for n in 1..=4usize {
            let all = perms(n);
            let mut classes: BTreeSet<Vec<usize>> = BTreeSet::new();
            let mut count = 0usize;
            for a in &all {
                for b in &all {
                    // transitivity
                    let mut reach = vec![false; n];
                    reach[0] = true;
                    let mut stack = vec![0usize];
                    while let Some(c) = stack.pop() {
                        for p in [a, b] {
                            if !reach[p[c]] {
                                reach[p[c]] = true;
                                stack.push(p[c]);
                            }
                        }
                    }
                    if !reach.iter().all(|&r| r) {
                        continue;
                    }
                    let mut min_key: Option<Vec<usize>> = None;
                    for s in &all {
                        let si = inverse(s);
                        let ca = compose(&compose(&si, a), s);
                        let cb = compose(&compose(&si, b), s);
                        let key: Vec<usize> =
                            ca.iter().chain(cb.iter()).copied().collect();
                        if min_key.as_ref().is_none_or(|m| key < *m) {
                            min_key = Some(key);
                        }
                    }
                    if classes.insert(min_key.unwrap()) {
                        count += 1;
                    }
                }
            }
            let p = pres(&["a", "b"], &[]);
            assert_eq!(
                low_index_tables(&p, n, &[]).unwrap().len(),
                count,
                "n={n}"
            );
        }
    }

    #[test]
    fn low_index_exclusion() {
        // <a | a^3>: only the trivial subgroup (index 3, regular action)
        // avoids conjugates of a
        let p = pres(&["a"], &["a^3"]);
        let a = Word::parse("a", &p.generators).unwrap();
        let t = low_index_tables(&p, 3, &[a.clone()]).unwrap();
        assert_eq!(t.len(), 1);
        // whole group (index 1) contains a
        assert_eq!(low_index_tables(&p, 1, &[a]).unwrap().len(), 0);
    }

    #[test]
    fn reidemeister_schreier_nielsen_rank() {
        // index-2 subgroups of F2 are free of rank 3
        let p = pres(&["a", "b"], &[]);
        for t in low_index_tables(&p, 2, &[]).unwrap() {
            let sp = reidemeister_schreier(&p, &t, Transversal::BfsForward);
            assert_eq!(sp.presentation.generators.len(), 3);
            assert!(sp.presentation.relators.is_empty());
        }
    }

    #[test]
    fn reidemeister_schreier_cyclic_subgroup() {
        // <a | a^6>, subgroup <a^2> has index 2 and abelianization Z/3
        let p = pres(&["a"], &["a^6"]);
        let sub = vec![Word::parse("a^2", &p.generators).unwrap()];
        let t = todd_coxeter(&p, &sub, 100).unwrap();
        assert_eq!(t.n, 2);
        let inv = homology(&p, &t, Transversal::BfsForward);
        assert_eq!(inv.free_rank, 0);
        assert_eq!(inv.torsion, vec![3]);
    }

    #[test]
    fn rs_index_one_preserves_abelianization() {
        let p = pres(&["a", "b"], &["a b a^-1 b^-1"]);
        let gens = vec![
            Word::parse("a", &p.generators).unwrap(),
            Word::parse("b", &p.generators).unwrap(),
        ];
        let t = todd_coxeter(&p, &gens, 100).unwrap();
        assert_eq!(t.n, 1);
        let inv = homology(&p, &t, Transversal::BfsForward);
        assert_eq!((inv.free_rank, inv.torsion.len()), (2, 0));
    }

    #[test]
    fn snf_examples() {
        let b = |m: &[&[i64]]| -> Vec<Vec<BigInt>> {
            m.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect()
        };
        let (rank, div) = smith_normal_form(&b(&[&[1, 0], &[0, 1]]));
        assert_eq!((rank, div), (0, vec![BigInt::from(1), BigInt::from(1)]));
        let (rank, div) = smith_normal_form(&b(&[&[2, 4], &[6, 8]]));
        assert_eq!((rank, div), (0, vec![BigInt::from(2), BigInt::from(4)]));
        let (rank, div) = smith_normal_form(&b(&[&[2, 0], &[0, 3]]));
        assert_eq!((rank, div), (0, vec![BigInt::from(1), BigInt::from(6)]));
        let (rank, div) = smith_normal_form(&b(&[&[0, 0], &[0, 0]]));
        assert_eq!((rank, div), (2, vec![]));
        let (rank, div) = smith_normal_form(&b(&[&[6, 0, 0]]));
        assert_eq!((rank, div), (2, vec![BigInt::from(6)]));
    }

    #[test]
    fn snf_divisor_chain_property() {
        // pseudorandom small matrices: the chain divides, and the product of
        // divisors matches the gcd of k x k minors (k = chain length) for
        // 2x2 cases via determinant
        let mut seed = 0x12345678u64;
        let mut rng = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % 13) as i64 - 6
        };
        for _ in 0..200 {
            let m: Vec<Vec<BigInt>> = (0..3)
                .map(|_| (0..3).map(|_| BigInt::from(rng())).collect())
                .collect();
            let (rank, div) = smith_normal_form(&m);
            assert_eq!(rank + div.len(), 3);
            for w in div.windows(2) {
                assert!((&w[1] % &w[0]).is_zero(), "chain must divide: {div:?}");
            }
            for d in &div {
                assert!(d.is_positive());
            }
        }
    }

    #[test]
    fn transversal_independence() {
        let p = pres(&["a", "b"], &["a^2", "b^3", "a b a b a b"]); // A4
        for n in [2usize, 3, 4] {
            for t in low_index_tables(&p, n, &[]).unwrap() {
                let h1 = homology(&p, &t, Transversal::BfsForward);
                let h2 = homology(&p, &t, Transversal::BfsReversedGenerators);
                assert_eq!(h1, h2, "n={n}");
            }
        }
    }

    #[test]
    fn abelian_invariant_display() {
        let inv = AbelianInvariants {
            free_rank: 0,
            torsion: vec![3, 3, 9],
        };
        assert_eq!(inv.to_string(), "(Z/3)^2 + Z/9");
        let inv = AbelianInvariants {
            free_rank: 4,
            torsion: vec![],
        };
        assert_eq!(inv.to_string(), "Z^4");
        let inv = AbelianInvariants {
            free_rank: 2,
            torsion: vec![3],
        };
        assert_eq!(inv.to_string(), "Z/3 + Z^2");
        let inv = AbelianInvariants {
            free_rank: 0,
            torsion: vec![2, 2, 2, 2, 4],
        };
        assert_eq!(inv.to_string(), "(Z/2)^4 + Z/4");
        let inv = AbelianInvariants {
            free_rank: 0,
            torsion: vec![6],
        };
        assert_eq!(inv.to_string(), "Z/2 + Z/3");
        let inv = AbelianInvariants {
            free_rank: 0,
            torsion: vec![],
        };
        assert_eq!(inv.to_string(), "0");
    }

    #[test]
    fn cusp_count_orbits() {
        // regular action of Z/6 = <a>; peripheral <a^2> has 2 orbits
        let p = pres(&["a"], &["a^6"]);
        let t = todd_coxeter(&p, &[], 100).unwrap();
        let w = Word::parse("a^2", &p.generators).unwrap();
        assert_eq!(cusp_count(&[w], &t).unwrap(), 2);
        assert!(cusp_count(&[], &t).is_err());
        // index-1 table always has one orbit
        let p2 = pres(&["a"], &["a"]);
        let t1 = todd_coxeter(&p2, &[], 10).unwrap();
        let a = Word::parse("a", &p2.generators).unwrap();
        assert_eq!(cusp_count(&[a], &t1).unwrap(), 1);
    }

    #[test]
    fn group_data_parsing() {
        let text = "\
# example file
generators: J R1
relators:
J^3
R1^6
torsion:
J
peripheral: R1^2
intersection:
J R1 J^-1
";
        let g = GroupData::parse(text).unwrap();
        assert_eq!(g.presentation.generators, vec!["J", "R1"]);
        assert_eq!(g.presentation.relators.len(), 2);
        assert_eq!(g.torsion_reps.len(), 1);
        assert_eq!(g.peripheral.len(), 1);
        assert_eq!(g.intersection.len(), 1);
        assert!(GroupData::parse("relators:\nJ^2\n").is_err());
        assert!(GroupData::parse("J^2\n").is_err());
    }

    #[test]
    fn permutation_closure_invariant() {
        let p = pres(&["a", "b"], &["a^2", "b^3", "a b a b"]);
        for n in [1usize, 2, 3, 6] {
            for t in low_index_tables(&p, n, &[]).unwrap() {
                assert!(t.check_invariants(&p), "n={n}");
            }
        }
    }

    #[test]
    fn is_torsion_free_criterion() {
        // in <a | a^6>, subgroup <a^2> contains a^2 (torsion) but not a^3
        let p = pres(&["a"], &["a^6"]);
        let sub = vec![Word::parse("a^2", &p.generators).unwrap()];
        let t = todd_coxeter(&p, &sub, 100).unwrap();
        let a2 = Word::parse("a^2", &p.generators).unwrap();
        let a3 = Word::parse("a^3", &p.generators).unwrap();
        assert!(!is_torsion_free(&[a2], &t));
        assert!(is_torsion_free(&[a3], &t));
    }

    #[test]
    fn low_index_profile_symmetric_group() {
        // S3 has one class of index-2 subgroups (A3), one class of index-3
        // subgroups (the transposition subgroups), and none of index 4
        let text = "generators: a b\nrelators:\na^2\nb^3\na b a b\n";
        let g = GroupData::parse(text).unwrap();
        let whole = todd_coxeter(&g.presentation, &[], 100).unwrap();
        // subgroup = whole group: table has a single coset
        let table = todd_coxeter(
            &g.presentation,
            &[
                Word::parse("a", &g.presentation.generators).unwrap(),
                Word::parse("b", &g.presentation.generators).unwrap(),
            ],
            100,
        )
        .unwrap();
        assert_eq!(whole.n, 6);
        assert_eq!(table.n, 1);
        assert_eq!(low_index_profile(&g, &table, 4).unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn staged_search_merges_isometric_covers() {
        // Z x Z with the index-4 intersection <a^2, b^2>: the three index-8
        // composed subgroups are distinct up to conjugacy but all abstractly
        // Z x Z with identical invariants (the same torus cover), so census
        // mode counts them once while the plain search keeps all three
        let text = "generators: a b\nrelators:\na b a^-1 b^-1\nintersection:\na^2\nb^2\n";
        let g = GroupData::parse(text).unwrap();
        let plain = staged_search(&g, 2, false).unwrap();
        assert_eq!(plain.len(), 3);
        let census = staged_search(&g, 2, true).unwrap();
        assert_eq!(census.len(), 1);
        assert_eq!(census[0].index, 8);
        assert_eq!(census[0].abelian_invariants.free_rank, 2);
    }
}
