use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::term::{unify, Position};
use crate::trs::Trs;

/// Rule `inner`'s left-hand side unifies with the subterm of rule `outer`'s
/// left-hand side at `position`. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlap {
    pub outer: usize,
    pub inner: usize,
    pub position: Position,
}

impl fmt::Display for Overlap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(rule {}, rule {}, {})",
            self.outer + 1,
            self.inner + 1,
            self.position
        )
    }
}

impl Serialize for Overlap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Overlap", 3)?;
        st.serialize_field("outer_rule", &(self.outer + 1))?;
        st.serialize_field("inner_rule", &(self.inner + 1))?;
        st.serialize_field("position", &self.position.to_string())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfluenceVerdict {
    /// Parallel-innermost rewriting is confluent because no rules overlap.
    Confluent,
    /// The criterion does not apply; this is not a claim of non-confluence.
    Unknown(Overlap),
}

impl Serialize for ConfluenceVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ConfluenceVerdict", 2)?;
        match self {
            ConfluenceVerdict::Confluent => {
                st.serialize_field("verdict", "confluent")?;
                st.serialize_field("reason", "non-overlapping")?;
            }
            ConfluenceVerdict::Unknown(w) => {
                st.serialize_field("verdict", "unknown")?;
                st.serialize_field("overlap", w)?;
            }
        }
        st.end()
    }
}

/// First overlap among all ordered rule pairs, or `None` for a
/// non-overlapping system. A rule is not compared with itself at the root.
pub fn is_non_overlapping(trs: &Trs) -> Option<Overlap> {
    is_non_overlapping_with(trs, false)
}

/// As [`is_non_overlapping`]; with `self_root` a rule's trivial overlap with
/// its own renamed copy at the root also counts.
pub fn is_non_overlapping_with(trs: &Trs, self_root: bool) -> Option<Overlap> {
    let rules = trs.rules();
    for (i, outer) in rules.iter().enumerate() {
        let avoid: BTreeSet<String> = outer.variables().iter().map(|x| x.to_string()).collect();
        for (j, inner) in rules.iter().enumerate() {
            let inner = inner.rename_apart(&avoid);
            for position in outer.lhs.positions() {
                if i == j && position.is_root() && !self_root {
                    continue;
                }
                let sub = outer.lhs.get(&position).expect("own position");
                if !sub.is_var() && unify(sub, &inner.lhs).is_some() {
                    return Some(Overlap {
                        outer: i,
                        inner: j,
                        position,
                    });
                }
            }
        }
    }
    None
}

pub fn confluence_parallel_innermost(trs: &Trs) -> ConfluenceVerdict {
    match is_non_overlapping(trs) {
        None => ConfluenceVerdict::Confluent,
        Some(w) => ConfluenceVerdict::Unknown(w),
    }
}
