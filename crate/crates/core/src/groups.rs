//! Self-similar group actions on the levels of a rooted d-regular tree.
//!
//! A generator is given by a wreath recursion `g = (g_0, ..., g_{d-1}) σ`
//! and acts on words by `g(i w) = σ(i) g_i(w)`. A level-n vertex `w_1..w_n`
//! is indexed as `w_1 d^{n-1} + index(w_2..w_n)`, first letter most
//! significant, so the level-1 blocks are contiguous ranges.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    Grigorchuk,
    Lamplighter,
    Hanoi,
    Custom,
}

impl std::str::FromStr for Builtin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grigorchuk" | "g" => Ok(Builtin::Grigorchuk),
            "lamplighter" | "l" => Ok(Builtin::Lamplighter),
            "hanoi" | "h" => Ok(Builtin::Hanoi),
            "custom" => Ok(Builtin::Custom),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Grigorchuk => "grigorchuk",
            Builtin::Lamplighter => "lamplighter",
            Builtin::Hanoi => "hanoi",
            Builtin::Custom => "custom",
        }
    }
}

/// One generator: root permutation plus sections (`None` is the identity).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub perm: Vec<usize>,
    pub sections: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub d: usize,
    pub generators: Vec<Generator>,
    pub builtin: Builtin,
}

/// Raw recursion row: name, root permutation, section names (`"1"` = identity).
pub type TableRow<'a> = (&'a str, Vec<usize>, Vec<&'a str>);

impl GroupSpec {
    /// Validate and resolve a recursion table.
    pub fn from_table(d: usize, rows: &[TableRow<'_>], builtin: Builtin) -> Result<Self> {
        if d < 2 {
            return Err(Error::AlphabetMismatch(format!("alphabet size {d} < 2")));
        }
        let names: Vec<&str> = rows.iter().map(|r| r.0).collect();
        let mut generators = Vec::with_capacity(rows.len());
        for (name, perm, secs) in rows {
            if name.is_empty() || *name == "1" || name.contains(|c: char| c.is_whitespace() || c == '^') {
                return Err(Error::UnknownGenerator(name.to_string()));
            }
            if perm.len() != d || secs.len() != d {
                return Err(Error::AlphabetMismatch(format!(
                    "generator `{name}` has {} letters and {} sections, expected {d}",
                    perm.len(),
                    secs.len()
                )));
            }
            let mut seen = vec![false; d];
            for &p in perm {
                if p >= d || seen[p] {
                    return Err(Error::NotABijection(name.to_string()));
                }
                seen[p] = true;
            }
            let sections = secs
                .iter()
                .map(|s| {
                    if *s == "1" {
                        Ok(None)
                    } else {
                        names
                            .iter()
                            .position(|n| n == s)
                            .map(Some)
                            .ok_or_else(|| Error::UnresolvedSection(s.to_string()))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            generators.push(Generator { name: name.to_string(), perm: perm.clone(), sections });
        }
        Ok(GroupSpec { d, generators, builtin })
    }

    /// Parse `a=(1,1,a)[1,0,2]; b=(b,a)` style tables. A missing bracket
    /// means the trivial root permutation.
    pub fn parse_table(d: usize, text: &str) -> Result<Self> {
        let mut owned: Vec<(String, Vec<usize>, Vec<String>)> = Vec::new();
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, rhs) = item
                .split_once('=')
                .ok_or_else(|| Error::Degenerate(format!("missing `=` in `{item}`")))?;
            let rhs = rhs.trim();
            let open = rhs.find('(').ok_or_else(|| Error::Degenerate(format!("missing sections in `{item}`")))?;
            let close = rhs.find(')').ok_or_else(|| Error::Degenerate(format!("unclosed sections in `{item}`")))?;
            let secs: Vec<String> = rhs[open + 1..close].split(',').map(|s| s.trim().to_string()).collect();
            let rest = rhs[close + 1..].trim();
            let perm = if rest.is_empty() {
                (0..d).collect()
            } else {
                let inner = rest.trim_start_matches('[').trim_end_matches(']');
                inner
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| Error::NotABijection(name.trim().to_string())))
                    .collect::<Result<Vec<_>>>()?
            };
            owned.push((name.trim().to_string(), perm, secs));
        }
        let rows: Vec<TableRow<'_>> = owned
            .iter()
            .map(|(n, p, s)| (n.as_str(), p.clone(), s.iter().map(String::as_str).collect()))
            .collect();
        Self::from_table(d, &rows, Builtin::Custom)
    }

    pub fn builtin(which: Builtin) -> Result<Self> {
        match which {
            Builtin::Grigorchuk => Self::from_table(
                2,
                &[
                    ("a", vec![1, 0], vec!["1", "1"]),
                    ("b", vec![0, 1], vec!["a", "c"]),
                    ("c", vec![0, 1], vec!["a", "d"]),
                    ("d", vec![0, 1], vec!["1", "b"]),
                ],
                which,
            ),
            Builtin::Lamplighter => Self::from_table(
                2,
                &[("a", vec![1, 0], vec!["b", "a"]), ("b", vec![0, 1], vec!["b", "a"])],
                which,
            ),
            Builtin::Hanoi => Self::from_table(
                3,
                &[
                    ("a", vec![1, 0, 2], vec!["1", "1", "a"]),
                    ("b", vec![2, 1, 0], vec!["1", "b", "1"]),
                    ("c", vec![0, 2, 1], vec!["c", "1", "1"]),
                ],
                which,
            ),
            Builtin::Custom => Err(Error::Degenerate("custom groups need a recursion table".into())),
        }
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn generator_names(&self) -> Vec<&str> {
        self.generators.iter().map(|g| g.name.as_str()).collect()
    }

    /// Level-n permutations of every generator, by iterating the recursion
    /// upward from level 0.
    pub fn all_level_perms(&self, n: usize) -> Vec<Vec<usize>> {
        let mut cur: Vec<Vec<usize>> = vec![vec![0]; self.generators.len()];
        let mut m = 1usize;
        for _ in 0..n {
            let next = self
                .generators
                .iter()
                .map(|g| {
                    let mut p = vec![0usize; m * self.d];
                    for i in 0..self.d {
                        let dst = g.perm[i] * m;
                        match g.sections[i] {
                            None => (0..m).for_each(|w| p[i * m + w] = dst + w),
                            Some(s) => (0..m).for_each(|w| p[i * m + w] = dst + cur[s][w]),
                        }
                    }
                    p
                })
                .collect();
            cur = next;
            m *= self.d;
        }
        cur
    }

    /// Action of a word at level n. Tokens are generator names, optionally
    /// suffixed by `^-1`; the rightmost token acts first.
    pub fn level_action(&self, word: &str, n: usize) -> Result<LevelAction> {
        let tokens = self.tokenize(word)?;
        let perms = self.all_level_perms(n);
        let mut acc = LevelAction::identity(self.d, n);
        for (idx, inv) in tokens.into_iter().rev() {
            let mut g = LevelAction { d: self.d, n, perm: perms[idx].clone() };
            if inv {
                g = g.inverse();
            }
            acc = g.compose(&acc);
        }
        Ok(acc)
    }

    fn tokenize(&self, word: &str) -> Result<Vec<(usize, bool)>> {
        let mut out = Vec::new();
        let mut rest = word.trim();
        while !rest.is_empty() {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == '*' || c == '.');
            if rest.is_empty() {
                break;
            }
            if let Some(r) = rest.strip_prefix('1') {
                rest = r;
                continue;
            }
            let best = self
                .generators
                .iter()
                .enumerate()
                .filter(|(_, g)| rest.starts_with(g.name.as_str()))
                .max_by_key(|(_, g)| g.name.len())
                .ok_or_else(|| Error::UnknownGenerator(rest.chars().take_while(|c| c.is_alphanumeric()).collect()))?;
            rest = &rest[best.1.name.len()..];
            let inv = if let Some(r) = rest.strip_prefix("^-1") {
                rest = r;
                true
            } else {
                false
            };
            out.push((best.0, inv));
        }
        Ok(out)
    }

    pub fn generator_matrix(&self, gen: &str, n: usize) -> Result<PermMatrix> {
        let a = self.level_action(gen, n)?;
        Ok(PermMatrix { perm: a.perm })
    }

    /// Edge multiset `(v, s v)` for each listed generator; loops are kept.
    pub fn schreier_graph(&self, gens: &[&str], n: usize) -> Result<SchreierGraph> {
        if n == 0 {
            return Err(Error::Level { level: 0, reason: "Schreier graphs need n >= 1".into() });
        }
        let mut edges = Vec::new();
        for g in gens {
            let a = self.level_action(g, n)?;
            edges.extend(a.perm.iter().enumerate().map(|(v, &w)| Edge { src: v, dst: w, label: g.to_string() }));
        }
        Ok(SchreierGraph { vertices: self.d.pow(n as u32), edges })
    }
}

/// A permutation of the level-n vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelAction {
    pub d: usize,
    pub n: usize,
    pub perm: Vec<usize>,
}

impl LevelAction {
    pub fn identity(d: usize, n: usize) -> Self {
        LevelAction { d, n, perm: (0..d.pow(n as u32)).collect() }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LevelAction) -> LevelAction {
        LevelAction { d: self.d, n: self.n, perm: other.perm.iter().map(|&v| self.perm[v]).collect() }
    }

    pub fn inverse(&self) -> LevelAction {
        let mut inv = vec![0; self.perm.len()];
        for (v, &w) in self.perm.iter().enumerate() {
            inv[w] = v;
        }
        LevelAction { d: self.d, n: self.n, perm: inv }
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.perm.len()];
        self.perm.iter().all(|&w| w < seen.len() && !std::mem::replace(&mut seen[w], true))
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(v, &w)| v == w)
    }

    /// Drop the last letter. Returns `None` if the action does not descend,
    /// which never happens for tree automorphisms.
    pub fn collapse(&self) -> Option<LevelAction> {
        if self.n == 0 {
            return None;
        }
        let m = self.perm.len() / self.d;
        let mut out = vec![usize::MAX; m];
        for (v, &w) in self.perm.iter().enumerate() {
            let (pv, pw) = (v / self.d, w / self.d);
            if out[pv] == usize::MAX {
                out[pv] = pw;
            } else if out[pv] != pw {
                return None;
            }
        }
        Some(LevelAction { d: self.d, n: self.n - 1, perm: out })
    }
}

/// Permutation matrix with `M[perm[v], v] = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermMatrix {
    pub perm: Vec<usize>,
}

impl PermMatrix {
    pub fn size(&self) -> usize {
        self.perm.len()
    }
    /// Nonzero positions as `(row, col)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.perm.iter().enumerate().map(|(v, &w)| (w, v))
    }
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        let mut m = vec![vec![0.0; n]; n];
        for (r, c) in self.entries() {
            m[r][c] = 1.0;
        }
        m
    }
    /// Symmetric exactly when the permutation is an involution.
    pub fn is_symmetric(&self) -> bool {
        self.perm.iter().enumerate().all(|(v, &w)| self.perm[w] == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchreierGraph {
    pub vertices: usize,
    pub edges: Vec<Edge>,
}

impl SchreierGraph {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("src,dst,label\n");
        for e in &self.edges {
            s.push_str(&format!("{},{},{}\n", e.src, e.dst, e.label));
        }
        s
    }

    /// `{"vertices": n, "adjacency": [[{"dst":..,"label":..}, ...], ...]}`
    pub fn to_adjacency_json(&self) -> serde_json::Value {
        let mut adj: Vec<Vec<serde_json::Value>> = vec![Vec::new(); self.vertices];
        for e in &self.edges {
            adj[e.src].push(serde_json::json!({"dst": e.dst, "label": e.label}));
        }
        serde_json::json!({"vertices": self.vertices, "adjacency": adj})
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|e| e.src == e.dst).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> GroupSpec {
        GroupSpec::builtin(Builtin::Grigorchuk).unwrap()
    }

    #[test]
    fn grigorchuk_small_levels() {
        let g = g();
        assert_eq!(g.level_action("a", 2).unwrap().perm, vec![2, 3, 0, 1]);
        assert!(g.level_action("b", 1).unwrap().is_identity());
        assert_eq!(g.level_action("b", 2).unwrap().perm, vec![1, 0, 2, 3]);
        assert!(g.level_action("d", 2).unwrap().is_identity());
    }

    #[test]
    fn hanoi_a_is_transposition() {
        let h = GroupSpec::builtin(Builtin::Hanoi).unwrap();
        assert_eq!(h.generator_matrix("a", 1).unwrap().perm, vec![1, 0, 2]);
    }

    #[test]
    fn lamplighter_b_level1_identity() {
        let l = GroupSpec::builtin(Builtin::Lamplighter).unwrap();
        assert!(l.level_action("b", 1).unwrap().is_identity());
    }

    #[test]
    fn custom_trivial_generator() {
        let c = GroupSpec::parse_table(2, "a=(a,a)").unwrap();
        for n in 0..6 {
            assert!(c.level_action("a", n).unwrap().is_identity());
        }
    }

    #[test]
    fn table_errors() {
        assert_eq!(GroupSpec::parse_table(2, "a=(x,a)"), Err(Error::UnresolvedSection("x".into())));
        assert_eq!(GroupSpec::parse_table(2, "a=(a,a)[0,0]"), Err(Error::NotABijection("a".into())));
        assert!(matches!(g().level_action("z", 2), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn word_convention_rightmost_first() {
        let l = GroupSpec::builtin(Builtin::Lamplighter).unwrap();
        let a = l.level_action("a", 3).unwrap();
        let binv = l.level_action("b^-1", 3).unwrap();
        assert_eq!(l.level_action("b^-1 a", 3).unwrap(), binv.compose(&a));
    }

    #[test]
    fn schreier_level1() {
        let g = g().schreier_graph(&["a", "b", "c", "d"], 1).unwrap();
        assert_eq!(g.vertices, 2);
        assert_eq!(g.loop_count(), 6);
        let h = GroupSpec::builtin(Builtin::Hanoi).unwrap().schreier_graph(&["a", "b", "c"], 1).unwrap();
        assert_eq!(h.loop_count(), 3);
        assert_eq!(h.edges.len(), 9);
        let id = GroupSpec::parse_table(2, "e=(e,e)").unwrap().schreier_graph(&["e"], 1).unwrap();
        assert_eq!(id.loop_count(), id.edges.len());
        assert!(id.to_csv().starts_with("src,dst,label\n"));
    }
}
