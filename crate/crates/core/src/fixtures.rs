//! The bundled example corpus.

use crate::tpdb::{self, System};
use crate::trs::{RelativeTrs, Trs};

pub const SIZE: &str = include_str!("../fixtures/size.trs");
pub const DOUBLES: &str = include_str!("../fixtures/doubles.trs");
pub const MOD: &str = include_str!("../fixtures/mod.trs");
pub const NONCONFLUENT: &str = include_str!("../fixtures/nonconfluent.trs");
pub const PLUS: &str = include_str!("../fixtures/plus.trs");
pub const SIZE_RELATIVE: &str = include_str!("../fixtures/size_relative.trs");
pub const RECURSION_3: &str = include_str!("../fixtures/recursion_3.trs");

/// `(file name, contents)` for every bundled fixture.
pub const ALL: &[(&str, &str)] = &[
    ("size.trs", SIZE),
    ("doubles.trs", DOUBLES),
    ("mod.trs", MOD),
    ("nonconfluent.trs", NONCONFLUENT),
    ("plus.trs", PLUS),
    ("size_relative.trs", SIZE_RELATIVE),
    ("recursion_3.trs", RECURSION_3),
];

fn plain(text: &str) -> Trs {
    tpdb::parse_trs(text).expect("bundled fixture parses")
}

pub fn size() -> Trs {
    plain(SIZE)
}

pub fn doubles() -> Trs {
    plain(DOUBLES)
}

pub fn modulo() -> Trs {
    plain(MOD)
}

pub fn nonconfluent() -> Trs {
    plain(NONCONFLUENT)
}

pub fn plus() -> Trs {
    plain(PLUS)
}

pub fn size_relative() -> RelativeTrs {
    match tpdb::parse(SIZE_RELATIVE).expect("bundled fixture parses") {
        System::Relative(rel) => rel,
        System::Plain(_) => unreachable!("fixture has a free rule"),
    }
}

/// `{f0(x) -> a} ∪ {fi(x) -> gi(x,x), gi(s(x),y) -> b(f(i-1)(y), gi(x,y)) | 1 <= i <= depth}`.
pub fn recursion(depth: usize) -> Trs {
    let mut text = String::from("(VAR x y)\n(RULES\n  f0(x) -> a\n");
    for i in 1..=depth {
        text.push_str(&format!("  f{i}(x) -> g{i}(x, x)\n"));
        text.push_str(&format!(
            "  g{i}(s(x), y) -> b(f{}(y), g{i}(x, y))\n",
            i - 1
        ));
    }
    text.push_str(")\n");
    plain(&text)
}
