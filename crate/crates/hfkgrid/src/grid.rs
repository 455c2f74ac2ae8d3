//! Grid diagrams: toroidal marking data, state gradings, rectangles, and
//! stabilization.
//!
//! An `n × n` grid carries one X and one O per row and per column, encoding a
//! knot (or link) together with a doubly pointed Heegaard diagram. States are
//! permutations: the state point on vertical line `i` sits at height
//! `perm[i]`. The Maslov grading is computed from the planar point-count
//! formula
//!
//! ```text
//! M(x) = J(x, x) - 2 J(x, S) + J(S, S) + 1
//! ```
//!
//! with `J` the symmetrized count of strictly southwest pairs, evaluated in
//! the fundamental domain with state columns counted from the right edge and
//! markings at half-integer cell centers. In this crate's convention the
//! X-markings carry the Maslov (`S^3`) grading and the Alexander grading is
//! `A = (M_X - M_O - (n-1)) / 2`; with these choices the bundled 5×5 torus
//! grid is the right-handed trefoil with `tau = +1`.

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Default bound on the grid size accepted by state enumeration; `10!` states
/// is the largest complex the default pipeline will materialize.
pub const DEFAULT_SIZE_CAP: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{which} row is not a permutation: {detail}")]
    NotAPermutation { which: char, detail: String },
    #[error("X/O collision in row {row}")]
    MarkingCollision { row: usize },
    #[error("grid size {n} is below the minimum of 2")]
    SizeTooSmall { n: usize },
    #[error("grid size {n} exceeds the enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("diagram has {components} components; knot operations need exactly 1")]
    NotAKnot { components: usize },
    #[error("Alexander grading is not an integer (link input or convention bug)")]
    NonIntegerAlexander,
    #[error("invalid stabilization site ({row}, {col}): not an X marking")]
    InvalidStabilizationSite { row: usize, col: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
}

/// A toroidal grid diagram. `sigma_x[i]` is the column of the X in row `i`,
/// `sigma_o[i]` the column of the O.
#[derive(Clone, PartialEq, Eq)]
pub struct GridDiagram {
    n: usize,
    sigma_x: Vec<usize>,
    sigma_o: Vec<usize>,
    name: Option<String>,
}

/// A generator: one point on each vertical line, with its bigrading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridState {
    pub perm: Vec<usize>,
    pub maslov: i64,
    pub alexander: i64,
}

/// One of the (at most two) embedded rectangles connecting two states that
/// differ by a transposition. Cells covered are the cyclic column interval
/// `(col_to, col_from]` times the cyclic row interval
/// `[row_start, row_start + height)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rectangle {
    pub col_from: usize,
    pub col_to: usize,
    /// Corner rows: the heights of the moving points of `x` at `col_from`
    /// and `col_to`; rows covered are the cyclic interval between them.
    pub row_start: usize,
    pub row_end: usize,
    pub width: usize,
    pub height: usize,
    /// X markings in the covered cells.
    pub x_count: usize,
    /// O markings in the covered cells.
    pub o_count: usize,
    /// State points of `x` in the open interior.
    pub interior_points: usize,
}

fn validate_permutation(n: usize, v: &[usize], which: char) -> Result<(), GridError> {
    if v.len() != n {
        return Err(GridError::NotAPermutation {
            which,
            detail: format!("expected {n} entries, got {}", v.len()),
        });
    }
    let mut seen = vec![false; n];
    for &c in v {
        if c >= n {
            return Err(GridError::NotAPermutation {
                which,
                detail: format!("column {c} out of range 0..{n}"),
            });
        }
        if seen[c] {
            return Err(GridError::NotAPermutation {
                which,
                detail: format!("column {c} repeated"),
            });
        }
        seen[c] = true;
    }
    Ok(())
}

impl GridDiagram {
    pub fn new(
        sigma_x: Vec<usize>,
        sigma_o: Vec<usize>,
        name: Option<String>,
    ) -> Result<Self, GridError> {
        let n = sigma_x.len().max(sigma_o.len());
        if n < 2 {
            return Err(GridError::SizeTooSmall { n });
        }
        validate_permutation(n, &sigma_x, 'X')?;
        validate_permutation(n, &sigma_o, 'O')?;
        if let Some(row) = (0..n).find(|&i| sigma_x[i] == sigma_o[i]) {
            return Err(GridError::MarkingCollision { row });
        }
        Ok(Self {
            n,
            sigma_x,
            sigma_o,
            name,
        })
    }

    /// Parse the grid file format: `n = <int>`, `X: c0 .. c(n-1)`,
    /// `O: c0 .. c(n-1)`; `#` starts a comment, blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, GridError> {
        let mut name = None;
        let mut fields: Vec<(usize, usize, &str, &str)> = Vec::new(); // line, col, key, rest
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = match raw.find('#') {
                Some(h) => {
                    let comment = raw[h + 1..].trim();
                    if let Some(rest) = comment.strip_prefix("name:") {
                        name = Some(rest.trim().to_string());
                    }
                    &raw[..h]
                }
                None => raw,
            };
            if content.trim().is_empty() {
                continue;
            }
            let Some(eqpos) = content.find(['=', ':']) else {
                return Err(GridError::Parse {
                    line,
                    column: 1,
                    message: format!(
                        "expected `key = value` or `key: values`, got `{}`",
                        content.trim()
                    ),
                });
            };
            let key = content[..eqpos].trim();
            let rest = content[eqpos + 1..].trim();
            let col = content.len() - content.trim_start().len() + 1;
            fields.push((line, col, key, rest));
        }
        if fields.len() != 3 {
            return Err(GridError::Parse {
                line: fields.last().map_or(1, |f| f.0),
                column: 1,
                message: format!("expected 3 data lines (n, X, O), found {}", fields.len()),
            });
        }
        let (nline, ncol, nkey, nrest) = fields[0];
        if nkey != "n" {
            return Err(GridError::Parse {
                line: nline,
                column: ncol,
                message: format!("first data line must be `n = <int>`, got key `{nkey}`"),
            });
        }
        let n: usize = nrest.parse().map_err(|_| GridError::Parse {
            line: nline,
            column: ncol,
            message: format!("invalid grid size `{nrest}`"),
        })?;
        let mut perms = Vec::new();
        for (idx, expect) in ["X", "O"].iter().enumerate() {
            let (line, col, key, rest) = fields[idx + 1];
            if key != *expect {
                return Err(GridError::Parse {
                    line,
                    column: col,
                    message: format!("expected `{expect}:` line, got key `{key}`"),
                });
            }
            let mut cols = Vec::new();
            for tok in rest.split_whitespace() {
                let c: usize = tok.parse().map_err(|_| GridError::Parse {
                    line,
                    column: rest.find(tok).map_or(col, |p| col + eq_offset(key) + p),
                    message: format!("invalid column index `{tok}`"),
                })?;
                cols.push(c);
            }
            perms.push(cols);
        }
        let o = perms.pop().unwrap();
        let x = perms.pop().unwrap();
        if x.len() != n || o.len() != n {
            return Err(GridError::Parse {
                line: fields[if x.len() != n { 1 } else { 2 }].0,
                column: 1,
                message: format!(
                    "marking row has {} entries, expected n = {n}",
                    if x.len() != n { x.len() } else { o.len() }
                ),
            });
        }
        Self::new(x, o, name)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma_x(&self) -> &[usize] {
        &self.sigma_x
    }

    pub fn sigma_o(&self) -> &[usize] {
        &self.sigma_o
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = Some(name.into());
    }

    /// Canonical single-representation text: whitespace and comments stripped.
    pub fn canonical_text(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "n = {}\nX: {}\nO: {}\n",
            self.n,
            join(&self.sigma_x),
            join(&self.sigma_o)
        )
    }

    /// Lowercase hex SHA-256 digest of the canonicalized grid file.
    pub fn grid_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical_text().as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Number of link components: cycles of row -> `sigma_x^{-1}(sigma_o(row))`.
    pub fn component_count(&self) -> usize {
        let mut inv_x = vec![0; self.n];
        for i in 0..self.n {
            inv_x[self.sigma_x[i]] = i;
        }
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = inv_x[self.sigma_o[i]];
            }
        }
        count
    }

    pub fn require_knot(&self) -> Result<(), GridError> {
        let c = self.component_count();
        if c == 1 {
            Ok(())
        } else {
            Err(GridError::NotAKnot { components: c })
        }
    }

    /// Marking points for `sigma` in doubled planar coordinates.
    fn mark_points(&self, sigma: &[usize]) -> Vec<(i64, i64)> {
        (0..self.n)
            .map(|r| (2 * (self.n - 1 - sigma[r]) as i64 + 1, 2 * r as i64 + 1))
            .collect()
    }

    fn state_points(&self, perm: &[usize]) -> Vec<(i64, i64)> {
        (0..self.n)
            .map(|i| (2 * (self.n - 1 - i) as i64, 2 * perm[i] as i64))
            .collect()
    }

    /// Maslov grading computed against an arbitrary marking set.
    fn maslov_against(&self, perm: &[usize], marks: &[(i64, i64)], j2_marks: i64) -> i64 {
        let pts = self.state_points(perm);
        let num = j2(&pts, &pts) - 2 * j2(&pts, marks) + j2_marks;
        debug_assert_eq!(num % 2, 0);
        num / 2 + 1
    }

    /// Maslov grading `M(x)`; the X-markings play the `S^3` basepoint role.
    pub fn maslov(&self, perm: &[usize]) -> i64 {
        let marks = self.mark_points(&self.sigma_x);
        self.maslov_against(perm, &marks, j2(&marks, &marks))
    }

    /// Maslov grading computed from the O-markings instead.
    pub fn maslov_o(&self, perm: &[usize]) -> i64 {
        let marks = self.mark_points(&self.sigma_o);
        self.maslov_against(perm, &marks, j2(&marks, &marks))
    }

    /// Alexander grading `A(x) = (M_X(x) - M_O(x) - (n-1)) / 2`.
    pub fn alexander(&self, perm: &[usize]) -> Result<i64, GridError> {
        let num = self.maslov(perm) - self.maslov_o(perm) - (self.n as i64 - 1);
        if num % 2 != 0 {
            return Err(GridError::NonIntegerAlexander);
        }
        Ok(num / 2)
    }

    pub fn state(&self, perm: Vec<usize>) -> Result<GridState, GridError> {
        validate_permutation(self.n, &perm, 'x')
            .map_err(|e| GridError::InvalidState(e.to_string()))?;
        let maslov = self.maslov(&perm);
        let alexander = self.alexander(&perm)?;
        Ok(GridState {
            perm,
            maslov,
            alexander,
        })
    }

    /// All `n!` states in lexicographic permutation order, with gradings.
    /// Knot diagrams only: on a link the Alexander grading need not be an
    /// integer.
    pub fn states(&self, cap: usize) -> Result<States<'_>, GridError> {
        if self.n > cap {
            return Err(GridError::CapExceeded { n: self.n, cap });
        }
        self.require_knot()?;
        Ok(States {
            grid: self,
            next: Some((0..self.n).collect()),
            alexander: None,
        })
    }

    /// As [`states`](Self::states), restricted to one Alexander grading.
    pub fn states_with_alexander(&self, cap: usize, a: i64) -> Result<States<'_>, GridError> {
        let mut it = self.states(cap)?;
        it.alexander = Some(a);
        Ok(it)
    }

    /// The rectangles from `x` to `y`: empty unless the states differ by
    /// exactly one transposition, in which case there are two.
    pub fn rectangles(&self, x: &GridState, y: &GridState) -> Vec<Rectangle> {
        let n = self.n;
        let diff: Vec<usize> = (0..n).filter(|&i| x.perm[i] != y.perm[i]).collect();
        if diff.len() != 2 {
            return Vec::new();
        }
        let (a, b) = (diff[0], diff[1]);
        if x.perm[a] != y.perm[b] || x.perm[b] != y.perm[a] {
            return Vec::new();
        }
        [(a, b), (b, a)]
            .iter()
            .map(|&(cf, ct)| self.rectangle_at(&x.perm, cf, ct))
            .collect()
    }

    /// The rectangle from `x` determined by the ordered corner columns
    /// `(col_from, col_to)`.
    fn rectangle_at(&self, x: &[usize], cf: usize, ct: usize) -> Rectangle {
        let n = self.n;
        let width = (cf + n - ct) % n;
        let row_start = x[cf];
        let height = (x[ct] + n - x[cf]) % n;
        let col_start = (ct + 1) % n;
        let in_cols = |c: usize| (c + n - col_start) % n < width;
        let in_rows = |r: usize| (r + n - row_start) % n < height;
        let mut x_count = 0;
        let mut o_count = 0;
        for r in 0..n {
            if in_rows(r) {
                if in_cols(self.sigma_x[r]) {
                    x_count += 1;
                }
                if in_cols(self.sigma_o[r]) {
                    o_count += 1;
                }
            }
        }
        let mut interior_points = 0;
        for (i, &xi) in x.iter().enumerate() {
            if i == cf || i == ct {
                continue;
            }
            if in_cols(i) && in_rows(xi) && xi != row_start {
                interior_points += 1;
            }
        }
        Rectangle {
            col_from: cf,
            col_to: ct,
            row_start,
            row_end: x[ct],
            width,
            height,
            x_count,
            o_count,
            interior_points,
        }
    }

    /// Differential targets of `x`: states reachable by an embedded rectangle
    /// with empty interior and no X marking. Returns `(target_perm, o_count)`
    /// pairs; the tilde differential additionally requires `o_count == 0`,
    /// and `o_count` is the Alexander filtration drop of the filtered one.
    pub(crate) fn boundary_targets(&self, x: &[usize]) -> Vec<(Vec<usize>, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for (cf, ct) in [(a, b), (b, a)] {
                    let r = self.rectangle_at(x, cf, ct);
                    if r.interior_points == 0 && r.x_count == 0 {
                        let mut y = x.to_vec();
                        y.swap(a, b);
                        out.push((y, r.o_count));
                    }
                }
            }
        }
        out
    }

    /// One stabilization at the X marking in `(row, col)`: the row and column
    /// through that X are split in two, producing an `(n+1)`-grid of the same
    /// knot.
    pub fn stabilize(&self, row: usize, col: usize) -> Result<GridDiagram, GridError> {
        let n = self.n;
        if row >= n || col >= n || self.sigma_x[row] != col {
            return Err(GridError::InvalidStabilizationSite { row, col });
        }
        let shift = |c: usize| if c >= col { c + 1 } else { c };
        let mut sx = vec![usize::MAX; n + 1];
        let mut so = vec![usize::MAX; n + 1];
        for i in 0..n {
            if i == row {
                continue;
            }
            let r = if i > row { i + 1 } else { i };
            sx[r] = shift(self.sigma_x[i]);
            so[r] = shift(self.sigma_o[i]);
        }
        sx[row] = col;
        sx[row + 1] = col + 1;
        so[row + 1] = col;
        so[row] = shift(self.sigma_o[row]);
        let name = self.name.as_ref().map(|s| format!("{s}+stab"));
        GridDiagram::new(sx, so, name)
    }
}

impl std::fmt::Debug for GridDiagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "GridDiagram(n={}, X={:?}, O={:?}{})",
            self.n,
            self.sigma_x,
            self.sigma_o,
            self.name
                .as_deref()
                .map(|s| format!(", {s}"))
                .unwrap_or_default()
        )
    }
}

fn eq_offset(key: &str) -> usize {
    key.len() + 2
}

/// Symmetrized strictly-southwest pair count, doubled
/// (`J2 = I(A,B) + I(B,A) = 2 J(A,B)`).
fn j2(a: &[(i64, i64)], b: &[(i64, i64)]) -> i64 {
    let mut count = 0i64;
    for &(ax, ay) in a {
        for &(bx, by) in b {
            if ax < bx && ay < by {
                count += 1;
            }
            if bx < ax && by < ay {
                count += 1;
            }
        }
    }
    count
}

/// Lazy lexicographic enumeration of grid states.
pub struct States<'a> {
    grid: &'a GridDiagram,
    next: Option<Vec<usize>>,
    alexander: Option<i64>,
}

impl Iterator for States<'_> {
    type Item = GridState;

    fn next(&mut self) -> Option<GridState> {
        loop {
            let perm = self.next.clone()?;
            self.next = next_permutation(&perm);
            let maslov = self.grid.maslov(&perm);
            let alexander = self
                .grid
                .alexander(&perm)
                .expect("knot diagrams have integral Alexander gradings");
            if let Some(a) = self.alexander {
                if alexander != a {
                    continue;
                }
            }
            return Some(GridState {
                perm,
                maslov,
                alexander,
            });
        }
    }
}

fn next_permutation(p: &[usize]) -> Option<Vec<usize>> {
    let mut v = p.to_vec();
    let n = v.len();
    if n < 2 {
        return None;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return None;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    Some(v)
}
