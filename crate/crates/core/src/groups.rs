//! Finite groups given by a fixed element listing and a Cayley table.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Above this order associativity is sampled instead of checked exhaustively.
pub const FULL_ASSOCIATIVITY_LIMIT: usize = 64;
const SAMPLED_TRIPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("table is not a Latin square: {0}")]
    NotLatin(String),
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("associativity fails for ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("generalized quaternion parameter n = {0} is outside 2..=5")]
    QuaternionOutOfRange(u32),
    #[error("group of order 0")]
    Empty,
}

/// Index of an element in a [`GroupSpec`] listing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement(pub usize);

/// A finite group as a listing `g_0, ..., g_{n-1}` plus its Cayley table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    labels: Vec<String>,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupSpec {
    /// Validates a Cayley table (`table[i][j]` = index of `g_i g_j`).
    pub fn from_table(labels: Vec<String>, rows: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if labels.len() != n {
            return Err(GroupError::Parse {
                line: 2,
                message: format!("expected {n} labels, found {}", labels.len()),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::NotLatin(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        check_latin(&rows)?;

        let table: Vec<usize> = rows.into_iter().flatten().collect();
        let at = |i: usize, j: usize| table[i * n + j];
        let identity = (0..n)
            .find(|&e| (0..n).all(|j| at(e, j) == j && at(j, e) == j))
            .ok_or(GroupError::NoIdentity)?;
        let inverse: Vec<usize> = (0..n)
            .map(|i| (0..n).find(|&j| at(i, j) == identity).expect("latin row"))
            .collect();

        let spec = GroupSpec {
            labels,
            table,
            identity,
            inverse,
        };
        spec.check_associative()?;
        Ok(spec)
    }

    fn check_associative(&self) -> Result<(), GroupError> {
        let n = self.order();
        let ok = |a: usize, b: usize, c: usize| {
            self.mul_idx(self.mul_idx(a, b), c) == self.mul_idx(a, self.mul_idx(b, c))
        };
        if n <= FULL_ASSOCIATIVITY_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !ok(a, b, c) {
                            return Err(GroupError::NotAssociative(a, b, c));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                );
                if !ok(a, b, c) {
                    return Err(GroupError::NotAssociative(a, b, c));
                }
            }
        }
        Ok(())
    }

    /// The generalized quaternion group Q_{2^{n+1}} = ⟨a, b | a^{2^n}, a^{2^{n-1}} = b², b⁻¹ab = a⁻¹⟩.
    ///
    /// Listing: `1, a, ..., a^{m-1}, b, a*b, ..., a^{m-1}*b` with `m = 2^n`.
    /// For `n = 2` the generators are labelled `x`, `y`.
    pub fn quaternion(n: u32) -> Result<Self, GroupError> {
        if !(2..=5).contains(&n) {
            return Err(GroupError::QuaternionOutOfRange(n));
        }
        let m = 1usize << n;
        let half = m / 2;
        let (a, b) = if n == 2 { ("x", "y") } else { ("a", "b") };
        // Normal form a^i b^e, index i + e*m. Uses b a = a^{-1} b and b² = a^{m/2}.
        let mul = |(i, e): (usize, usize), (j, f): (usize, usize)| -> (usize, usize) {
            let j = if e == 1 { (m - j) % m } else { j };
            let mut p = (i + j) % m;
            let mut s = e + f;
            if s == 2 {
                p = (p + half) % m;
                s = 0;
            }
            (p, s)
        };
        let split = |idx: usize| (idx % m, idx / m);
        let rows = (0..2 * m)
            .map(|g| {
                (0..2 * m)
                    .map(|h| {
                        let (p, s) = mul(split(g), split(h));
                        p + s * m
                    })
                    .collect()
            })
            .collect();
        let labels = (0..2 * m)
            .map(|idx| {
                let (i, e) = split(idx);
                let pow = match i {
                    0 => String::new(),
                    1 => a.to_string(),
                    _ => format!("{a}^{i}"),
                };
                match (pow.is_empty(), e) {
                    (true, 0) => "1".to_string(),
                    (false, 0) => pow,
                    (true, _) => b.to_string(),
                    (false, _) => format!("{pow}*{b}"),
                }
            })
            .collect();
        Self::from_table(labels, rows)
    }

    /// The canonical Q_8 listing `1, x, x^2, x^3, y, x*y, x^2*y, x^3*y`.
    pub fn q8() -> Self {
        Self::quaternion(2).expect("n = 2 is in range")
    }

    /// Cyclic group of order `n` listed as powers of a generator `g`.
    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        let labels = (0..n)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            })
            .collect();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        Self::from_table(labels, rows)
    }

    /// Dihedral group of order `2n`: rotations `r^i` then reflections `r^i*s`.
    pub fn dihedral(n: usize) -> Result<Self, GroupError> {
        let split = |idx: usize| (idx % n, idx / n);
        let rows = (0..2 * n)
            .map(|g| {
                (0..2 * n)
                    .map(|h| {
                        let ((i, e), (j, f)) = (split(g), split(h));
                        let j = if e == 1 { (n - j) % n } else { j };
                        (i + j) % n + ((e + f) % 2) * n
                    })
                    .collect()
            })
            .collect();
        let labels = (0..2 * n)
            .map(|idx| {
                let (i, e) = split(idx);
                let r = match i {
                    0 => String::new(),
                    1 => "r".to_string(),
                    _ => format!("r^{i}"),
                };
                match (r.is_empty(), e) {
                    (true, 0) => "1".to_string(),
                    (false, 0) => r,
                    (true, _) => "s".to_string(),
                    (false, _) => format!("{r}*s"),
                }
            })
            .collect();
        Self::from_table(labels, rows)
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(self.identity)
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, g: GroupElement) -> &str {
        &self.labels[g.0]
    }

    pub fn element(&self, index: usize) -> Option<GroupElement> {
        (index < self.order()).then_some(GroupElement(index))
    }

    pub fn element_by_label(&self, label: &str) -> Option<GroupElement> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(GroupElement)
    }

    #[inline]
    pub fn mul_idx(&self, i: usize, j: usize) -> usize {
        self.table[i * self.labels.len() + j]
    }

    #[inline]
    pub fn inv_idx(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn multiply(&self, g: GroupElement, h: GroupElement) -> GroupElement {
        GroupElement(self.mul_idx(g.0, h.0))
    }

    pub fn inverse_of(&self, g: GroupElement) -> GroupElement {
        GroupElement(self.inverse[g.0])
    }

    pub fn pow(&self, g: GroupElement, e: usize) -> GroupElement {
        (0..e).fold(self.identity(), |acc, _| self.multiply(acc, g))
    }

    pub fn element_order(&self, g: GroupElement) -> usize {
        let mut acc = g.0;
        let mut m = 1;
        while acc != self.identity {
            acc = self.mul_idx(acc, g.0);
            m += 1;
        }
        m
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (i + 1..n).all(|j| self.mul_idx(i, j) == self.mul_idx(j, i)))
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> {
        (0..self.order()).map(GroupElement)
    }

    /// Row `i` of the Cayley table.
    pub fn row(&self, i: usize) -> &[usize] {
        let n = self.order();
        &self.table[i * n..(i + 1) * n]
    }

    /// Parses the text table format: `order n`, a label line, then `n` rows of indices.
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line, message: String| GroupError::Parse { line, message };

        let (ln, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing `order n` header".into()))?;
        let n: usize = header
            .strip_prefix("order")
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(ln, format!("expected `order n`, found {header:?}")))?;
        if n == 0 {
            return Err(GroupError::Empty);
        }
        let (_, label_line) = lines
            .next()
            .ok_or_else(|| parse_err(ln + 1, "missing label line".into()))?;
        let labels: Vec<String> = label_line.split_whitespace().map(String::from).collect();

        let mut rows = Vec::with_capacity(n);
        for (ln, line) in lines {
            if rows.len() == n {
                return Err(parse_err(ln, "more rows than the declared order".into()));
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .ok()
                        .filter(|&v| v < n)
                        .ok_or_else(|| parse_err(ln, format!("bad entry {tok:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(parse_err(
                0,
                format!("expected {n} table rows, found {}", rows.len()),
            ));
        }
        Self::from_table(labels, rows)
    }

    /// Writes the text table format accepted by [`GroupSpec::parse`].
    pub fn serialize(&self) -> String {
        let n = self.order();
        let mut out = format!("order {n}\n{}\n", self.labels.join(" "));
        for i in 0..n {
            let row: Vec<String> = self.row(i).iter().map(usize::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "group of order {} [{}]",
            self.order(),
            self.labels.join(", ")
        )
    }
}

fn check_latin(rows: &[Vec<usize>]) -> Result<(), GroupError> {
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        let mut seen = vec![false; n];
        for (j, &v) in row.iter().enumerate() {
            if v >= n {
                return Err(GroupError::NotLatin(format!(
                    "entry ({i},{j}) = {v} out of range"
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(GroupError::NotLatin(format!(
                    "row {i} repeats {v} at column {j}"
                )));
            }
        }
    }
    for j in 0..n {
        let mut seen = vec![false; n];
        for (i, row) in rows.iter().enumerate() {
            if std::mem::replace(&mut seen[row[j]], true) {
                return Err(GroupError::NotLatin(format!(
                    "column {j} repeats {} at row {i}",
                    row[j]
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(g: &GroupSpec, label: &str) -> GroupElement {
        g.element_by_label(label).unwrap()
    }

    #[test]
    fn q8_listing_and_relations() {
        let q = GroupSpec::q8();
        assert_eq!(
            q.labels(),
            ["1", "x", "x^2", "x^3", "y", "x*y", "x^2*y", "x^3*y"]
        );
        let (x, y) = (el(&q, "x"), el(&q, "y"));
        assert_eq!(q.pow(x, 4), q.identity());
        assert_eq!(q.pow(x, 2), q.pow(y, 2));
        // xy = y^{-1} x
        assert_eq!(q.multiply(x, y), q.multiply(q.inverse_of(y), x));
        assert_eq!(q.multiply(y, x), el(&q, "x^3*y"));
        assert_eq!(q.multiply(y, y), el(&q, "x^2"));
        assert_eq!(q.multiply(x, el(&q, "x^3")), q.identity());
    }

    #[test]
    fn q8_inverses_and_orders() {
        let q = GroupSpec::q8();
        assert_eq!(q.inverse_of(q.identity()), q.identity());
        assert_eq!(q.inverse_of(el(&q, "y")), el(&q, "x^2*y"));
        assert_eq!(q.inverse_of(el(&q, "x")), el(&q, "x^3"));
        assert_eq!(q.element_order(q.identity()), 1);
        assert_eq!(q.element_order(el(&q, "x^2")), 2);
        assert_eq!(q.element_order(el(&q, "x*y")), 4);
    }

    #[test]
    fn generalized_quaternion_has_unique_involution() {
        for n in 2..=5u32 {
            let g = GroupSpec::quaternion(n).unwrap();
            assert_eq!(g.order(), 1 << (n + 1));
            let involutions: Vec<_> = g.elements().filter(|&e| g.element_order(e) == 2).collect();
            assert_eq!(involutions, vec![GroupElement(1 << (n - 1))], "n = {n}");
        }
        assert_eq!(
            GroupSpec::quaternion(1),
            Err(GroupError::QuaternionOutOfRange(1))
        );
        assert!(GroupSpec::quaternion(6).is_err());
    }

    #[test]
    fn cyclic_table_accepted() {
        let text = "order 4\n1 g g^2 g^3\n0 1 2 3\n1 2 3 0\n2 3 0 1\n3 0 1 2\n";
        let g = GroupSpec::parse(text).unwrap();
        assert_eq!(g, GroupSpec::cyclic(4).unwrap());
        assert!(g.is_abelian());
    }

    #[test]
    fn duplicated_row_entry_rejected() {
        let text = "order 3\na b c\n0 1 2\n1 1 0\n2 0 1\n";
        assert!(matches!(
            GroupSpec::parse(text),
            Err(GroupError::NotLatin(_))
        ));
    }

    #[test]
    fn non_associative_loop_rejected() {
        // Smallest non-associative loop (order 5, Latin square with identity 0).
        let text = "order 5\ne a b c d\n\
                    0 1 2 3 4\n\
                    1 0 3 4 2\n\
                    2 4 0 1 3\n\
                    3 2 4 0 1\n\
                    4 3 1 2 0\n";
        match GroupSpec::parse(text) {
            Err(GroupError::NotAssociative(a, b, c)) => {
                let rows: Vec<Vec<usize>> = text
                    .lines()
                    .skip(2)
                    .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
                    .collect();
                assert_ne!(rows[rows[a][b]][c], rows[a][rows[b][c]]);
            }
            other => panic!("expected associativity error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_are_located() {
        assert!(matches!(
            GroupSpec::parse("ord 2\n"),
            Err(GroupError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            GroupSpec::parse("order 2\na b\n0 1\n1 7\n"),
            Err(GroupError::Parse { line: 4, .. })
        ));
        assert!(matches!(
            GroupSpec::parse("order 2\na b\n0 1\n"),
            Err(GroupError::Parse { .. })
        ));
    }

    #[test]
    fn serialize_round_trip() {
        for g in [
            GroupSpec::q8(),
            GroupSpec::quaternion(3).unwrap(),
            GroupSpec::dihedral(4).unwrap(),
            GroupSpec::cyclic(6).unwrap(),
        ] {
            assert_eq!(GroupSpec::parse(&g.serialize()).unwrap(), g);
        }
    }

    #[test]
    fn dihedral_is_nonabelian() {
        let d8 = GroupSpec::dihedral(4).unwrap();
        assert!(!d8.is_abelian());
        let involutions = d8.elements().filter(|&e| d8.element_order(e) == 2).count();
        assert_eq!(involutions, 5);
    }
}
