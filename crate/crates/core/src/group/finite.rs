//! Finite groups given by Cayley tables: built-ins (cyclic groups, the
//! symmetric group on three letters) and user tables loaded from JSON.

use serde::Deserialize;

use crate::error::{Error, Result};

pub(crate) const MAX_FINITE_ORDER: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    pub(crate) name: String,
    pub(crate) elems: Vec<String>,
    pub(crate) table: Vec<Vec<usize>>,
    pub(crate) inv: Vec<usize>,
    pub(crate) identity: usize,
    pub(crate) abelian: bool,
    /// Cyclic order when the descriptor supplies the decomposition (z<m>);
    /// this is what makes the group eligible for Fourier duality.
    pub(crate) cyclic: Option<u64>,
    /// Measure normalization: false gives mu({e}) = 1 (levels: whole group
    /// at -1 and below, {e} at 0 and above); true gives mu(G) = 1 (whole
    /// group at 0 and below, {e} at 1 and above). The dual of a finite
    /// abelian group flips this flag.
    pub(crate) unit_is_whole: bool,
}

impl FiniteGroup {
    pub(crate) fn order(&self) -> usize {
        self.elems.len()
    }

    /// Level of the coarsest distinct subgroup (the whole group).
    pub(crate) fn whole_level(&self) -> i32 {
        if self.unit_is_whole {
            0
        } else {
            -1
        }
    }

    /// Level of the finest distinct subgroup ({e}).
    pub(crate) fn point_level(&self) -> i32 {
        self.whole_level() + 1
    }

    pub(crate) fn elem_index(&self, name: &str) -> Option<usize> {
        self.elems.iter().position(|e| e == name)
    }

    fn from_table(name: &str, elems: Vec<String>, table: Vec<Vec<usize>>, cyclic: Option<u64>) -> Result<Self> {
        let n = elems.len();
        if n == 0 {
            return Err(Error::Validation("empty element list".into()));
        }
        if n > MAX_FINITE_ORDER {
            return Err(Error::Validation(format!("finite group order {n} exceeds cap {MAX_FINITE_ORDER}")));
        }
        {
            let mut sorted = elems.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != n {
                return Err(Error::Validation("duplicate element names".into()));
            }
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::Validation("multiplication table is not square".into()));
        }
        if table.iter().flatten().any(|&v| v >= n) {
            return Err(Error::Validation("table entry out of range".into()));
        }
        // identity
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::Validation("no identity element".into()))?;
        // inverses
        let mut inv = vec![usize::MAX; n];
        for x in 0..n {
            inv[x] = (0..n)
                .find(|&y| table[x][y] == identity && table[y][x] == identity)
                .ok_or_else(|| Error::Validation(format!("element {} has no inverse", elems[x])))?;
        }
        // associativity, exhaustive at desk scale
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Validation(format!(
                            "associativity fails at ({}, {}, {})",
                            elems[a], elems[b], elems[c]
                        )));
                    }
                }
            }
        }
        let abelian = (0..n).all(|a| (0..n).all(|b| table[a][b] == table[b][a]));
        Ok(FiniteGroup {
            name: name.to_string(),
            elems,
            table,
            inv,
            identity,
            abelian,
            cyclic,
            unit_is_whole: false,
        })
    }

    pub(crate) fn cyclic_group(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Validation("cyclic group order must be positive".into()));
        }
        let n = m as usize;
        let elems: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let table: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::from_table(&format!("z{m}"), elems, table, Some(m))
    }

    /// Symmetric group on three letters; r is the 3-cycle, f a flip.
    pub(crate) fn s3() -> Self {
        type Perm = [usize; 3];
        fn compose(a: Perm, b: Perm) -> Perm {
            [a[b[0]], a[b[1]], a[b[2]]]
        }
        let e: Perm = [0, 1, 2];
        let r: Perm = [1, 2, 0];
        let f: Perm = [1, 0, 2];
        let named: Vec<(String, Perm)> = vec![
            ("e".into(), e),
            ("r".into(), r),
            ("r2".into(), compose(r, r)),
            ("f".into(), f),
            ("fr".into(), compose(f, r)),
            ("fr2".into(), compose(f, compose(r, r))),
        ];
        let perms: Vec<Perm> = named.iter().map(|(_, p)| *p).collect();
        let elems: Vec<String> = named.iter().map(|(n, _)| n.clone()).collect();
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let ab = compose(*a, *b);
                        perms.iter().position(|p| *p == ab).unwrap()
                    })
                    .collect()
            })
            .collect();
        Self::from_table("s3", elems, table, None).expect("s3 table is a group")
    }

    pub(crate) fn builtin(name: &str) -> Result<Self> {
        if name == "s3" {
            return Ok(Self::s3());
        }
        if let Some(rest) = name.strip_prefix('z') {
            if let Ok(m) = rest.parse::<u64>() {
                return Self::cyclic_group(m);
            }
        }
        Err(Error::Usage(format!("unknown finite group '{name}' (use s3, z<m>, or cayley@<file>)")))
    }

    /// Load and validate a Cayley-table group from a JSON file:
    /// `{"name": "...", "elements": ["e", ...], "table": [[...], ...]}`,
    /// table entries given as element names or indices.
    pub(crate) fn from_cayley_file(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        Self::from_cayley_json(&text, path)
    }

    pub(crate) fn from_cayley_json(text: &str, origin: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Name(String),
            Index(usize),
        }
        #[derive(Deserialize)]
        struct CayleyFile {
            name: Option<String>,
            elements: Vec<String>,
            table: Vec<Vec<Entry>>,
        }
        let parsed: CayleyFile =
            serde_json::from_str(text).map_err(|e| Error::Validation(format!("{origin}: {e}")))?;
        let elems = parsed.elements;
        let table: Vec<Vec<usize>> = parsed
            .table
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|entry| match entry {
                        Entry::Index(i) => Ok(i),
                        Entry::Name(s) => elems
                            .iter()
                            .position(|e| *e == s)
                            .ok_or_else(|| Error::Validation(format!("{origin}: unknown element '{s}' in table"))),
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let name = parsed.name.unwrap_or_else(|| format!("cayley@{origin}"));
        Self::from_table(&name, elems, table, None)
    }
}
