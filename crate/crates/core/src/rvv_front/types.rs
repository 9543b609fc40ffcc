//! RVV v1.0 intrinsic type names and their register footprint.
//!
//! Data types follow `v{int|uint|float}{SEW}m{f?}{LMUL}(x{NF})?_t`; masks are
//! `vbool{N}_t` where `N = SEW / LMUL`.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Register count, exact. Fractional LMUL keeps its fraction.
pub type Regs = Ratio<u32>;

/// Number of architectural vector registers.
pub const VECTOR_REGISTER_COUNT: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lmul {
    F8,
    F4,
    F2,
    M1,
    M2,
    M4,
    M8,
}

impl Lmul {
    pub const ALL: [Lmul; 7] = [
        Lmul::F8,
        Lmul::F4,
        Lmul::F2,
        Lmul::M1,
        Lmul::M2,
        Lmul::M4,
        Lmul::M8,
    ];

    pub fn ratio(self) -> Regs {
        match self {
            Lmul::F8 => Ratio::new(1, 8),
            Lmul::F4 => Ratio::new(1, 4),
            Lmul::F2 => Ratio::new(1, 2),
            Lmul::M1 => Ratio::from_integer(1),
            Lmul::M2 => Ratio::from_integer(2),
            Lmul::M4 => Ratio::from_integer(4),
            Lmul::M8 => Ratio::from_integer(8),
        }
    }

    pub fn is_fractional(self) -> bool {
        matches!(self, Lmul::F8 | Lmul::F4 | Lmul::F2)
    }

    /// Whole registers occupied by one group of this LMUL.
    pub fn physical_registers(self) -> u32 {
        self.ratio().ceil().to_integer().max(1)
    }

    fn suffix(self) -> &'static str {
        match self {
            Lmul::F8 => "mf8",
            Lmul::F4 => "mf4",
            Lmul::F2 => "mf2",
            Lmul::M1 => "m1",
            Lmul::M2 => "m2",
            Lmul::M4 => "m4",
            Lmul::M8 => "m8",
        }
    }

    fn from_suffix(s: &str) -> Option<Lmul> {
        Lmul::ALL.into_iter().find(|l| l.suffix() == s)
    }
}

impl fmt::Display for Lmul {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.suffix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElemKind {
    SignedInt,
    UnsignedInt,
    Float,
    Mask,
}

impl ElemKind {
    fn prefix(self) -> &'static str {
        match self {
            ElemKind::SignedInt => "int",
            ElemKind::UnsignedInt => "uint",
            ElemKind::Float => "float",
            ElemKind::Mask => "bool",
        }
    }

    fn widths(self) -> &'static [u32] {
        match self {
            ElemKind::SignedInt | ElemKind::UnsignedInt => &[8, 16, 32, 64],
            ElemKind::Float => &[16, 32, 64],
            ElemKind::Mask => &[],
        }
    }
}

/// How a vector value is charged against the register file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FootprintMode {
    /// Raw LMUL times tuple fields, fractions kept.
    #[default]
    PaperLiteral,
    /// Fractional LMUL rounded up to one whole register.
    Physical,
}

impl std::str::FromStr for FootprintMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper_literal" | "literal" => Ok(FootprintMode::PaperLiteral),
            "physical" => Ok(FootprintMode::Physical),
            other => Err(format!(
                "unknown pressure mode `{other}` (expected paper_literal or physical)"
            )),
        }
    }
}

impl fmt::Display for FootprintMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FootprintMode::PaperLiteral => "paper_literal",
            FootprintMode::Physical => "physical",
        })
    }
}

/// A decoded RVV vector type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VectorType {
    Data {
        kind: ElemKind,
        elem_bits: u32,
        lmul: Lmul,
        tuple_fields: u32,
    },
    /// `vbool{ratio}_t`. Always one register.
    Mask { ratio: u32 },
}

const MASK_RATIOS: [u32; 7] = [1, 2, 4, 8, 16, 32, 64];
const MAX_ELEN: u32 = 64;

impl VectorType {
    /// Builds a data type, rejecting combinations the intrinsic API does not define.
    pub fn data(kind: ElemKind, elem_bits: u32, lmul: Lmul, tuple_fields: u32) -> Option<Self> {
        if kind == ElemKind::Mask || !kind.widths().contains(&elem_bits) {
            return None;
        }
        // SEW <= ELEN * LMUL
        if Ratio::from_integer(elem_bits) > lmul.ratio() * MAX_ELEN {
            return None;
        }
        if !(1..=8).contains(&tuple_fields) {
            return None;
        }
        if tuple_fields > 1 && lmul.ratio() * tuple_fields > Ratio::from_integer(8) {
            return None;
        }
        Some(VectorType::Data {
            kind,
            elem_bits,
            lmul,
            tuple_fields,
        })
    }

    pub fn mask(ratio: u32) -> Option<Self> {
        MASK_RATIOS
            .contains(&ratio)
            .then_some(VectorType::Mask { ratio })
    }

    pub fn elem_kind(&self) -> ElemKind {
        match self {
            VectorType::Data { kind, .. } => *kind,
            VectorType::Mask { .. } => ElemKind::Mask,
        }
    }

    pub fn elem_bits(&self) -> Option<u32> {
        match self {
            VectorType::Data { elem_bits, .. } => Some(*elem_bits),
            VectorType::Mask { .. } => None,
        }
    }

    pub fn lmul(&self) -> Lmul {
        match self {
            VectorType::Data { lmul, .. } => *lmul,
            VectorType::Mask { .. } => Lmul::M1,
        }
    }

    pub fn tuple_fields(&self) -> u32 {
        match self {
            VectorType::Data { tuple_fields, .. } => *tuple_fields,
            VectorType::Mask { .. } => 1,
        }
    }

    /// Registers charged for one live value of this type.
    pub fn footprint(&self, mode: FootprintMode) -> Regs {
        let fields = self.tuple_fields();
        match mode {
            FootprintMode::PaperLiteral => self.lmul().ratio() * fields,
            FootprintMode::Physical => Ratio::from_integer(self.lmul().physical_registers() * fields),
        }
    }

    /// Canonical intrinsic type name, e.g. `vint32m2_t`.
    pub fn type_name(&self) -> String {
        match self {
            VectorType::Data {
                kind,
                elem_bits,
                lmul,
                tuple_fields,
            } => {
                let tuple = if *tuple_fields > 1 {
                    format!("x{tuple_fields}")
                } else {
                    String::new()
                };
                format!("v{}{}{}{}_t", kind.prefix(), elem_bits, lmul, tuple)
            }
            VectorType::Mask { ratio } => format!("vbool{ratio}_t"),
        }
    }

    /// Every type name the grammar admits.
    pub fn enumerate_all() -> Vec<VectorType> {
        let mut out = Vec::new();
        for kind in [ElemKind::SignedInt, ElemKind::UnsignedInt, ElemKind::Float] {
            for &bits in kind.widths() {
                for lmul in Lmul::ALL {
                    for fields in 1..=8 {
                        if let Some(t) = VectorType::data(kind, bits, lmul, fields) {
                            out.push(t);
                        }
                    }
                }
            }
        }
        out.extend(MASK_RATIOS.iter().filter_map(|&r| VectorType::mask(r)));
        out
    }
}

impl fmt::Display for VectorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.type_name())
    }
}

/// Decodes an RVV intrinsic type name. `None` means "not a vector type",
/// which callers use to filter out scalars and pointers.
pub fn parse_vector_type(type_name: &str) -> Option<VectorType> {
    let body = type_name.strip_prefix('v')?.strip_suffix("_t")?;
    let parsed = if let Some(ratio) = body.strip_prefix("bool") {
        VectorType::mask(ratio.parse().ok()?)?
    } else {
        let (kind, rest) = [ElemKind::UnsignedInt, ElemKind::SignedInt, ElemKind::Float]
            .into_iter()
            .find_map(|k| body.strip_prefix(k.prefix()).map(|r| (k, r)))?;
        let digits = rest.bytes().take_while(u8::is_ascii_digit).count();
        let elem_bits: u32 = rest[..digits].parse().ok()?;
        let rest = &rest[digits..];
        let (lmul_part, fields) = match rest.split_once('x') {
            Some((l, nf)) => (l, nf.parse().ok()?),
            None => (rest, 1),
        };
        VectorType::data(kind, elem_bits, Lmul::from_suffix(lmul_part)?, fields)?
    };
    // rejects leading zeros, `x1` and similar non-canonical spellings
    (parsed.type_name() == type_name).then_some(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_named_examples() {
        assert_eq!(
            parse_vector_type("vint32m2_t"),
            Some(VectorType::Data {
                kind: ElemKind::SignedInt,
                elem_bits: 32,
                lmul: Lmul::M2,
                tuple_fields: 1
            })
        );
        let half = parse_vector_type("vfloat16mf4_t").unwrap();
        assert_eq!(half.elem_kind(), ElemKind::Float);
        assert_eq!(half.elem_bits(), Some(16));
        assert_eq!(half.lmul().ratio(), Ratio::new(1, 4));

        let tuple = parse_vector_type("vuint8m2x3_t").unwrap();
        assert_eq!(tuple.elem_kind(), ElemKind::UnsignedInt);
        assert_eq!(tuple.tuple_fields(), 3);
        assert_eq!(tuple.lmul(), Lmul::M2);

        let mask = parse_vector_type("vbool8_t").unwrap();
        assert_eq!(mask.elem_kind(), ElemKind::Mask);
        assert_eq!(mask.elem_bits(), None);
        assert_eq!(mask.lmul(), Lmul::M1);
        assert_eq!(mask.tuple_fields(), 1);
    }

    #[test]
    fn scalars_are_not_vectors() {
        for name in ["size_t", "int32_t", "vl", "v_t", "vint32_t", "vint32m3_t", "vint32m1x1_t"] {
            assert_eq!(parse_vector_type(name), None, "{name}");
        }
    }

    #[test]
    fn rejects_illegal_combinations() {
        // SEW=64 with LMUL=1/2 exceeds ELEN*LMUL
        assert_eq!(parse_vector_type("vint64mf2_t"), None);
        assert_eq!(parse_vector_type("vfloat8m1_t"), None);
        // 8 * 2 fields > 8 registers
        assert_eq!(parse_vector_type("vint8m8x2_t"), None);
        assert_eq!(parse_vector_type("vint8m4x3_t"), None);
        assert!(parse_vector_type("vint8m4x2_t").is_some());
        assert_eq!(parse_vector_type("vbool3_t"), None);
        assert_eq!(parse_vector_type("vint032m1_t"), None);
    }

    #[test]
    fn footprint_modes() {
        let m4 = parse_vector_type("vint32m4_t").unwrap();
        assert_eq!(m4.footprint(FootprintMode::PaperLiteral), Ratio::from_integer(4));
        let mf2 = parse_vector_type("vint16mf2_t").unwrap();
        assert_eq!(mf2.footprint(FootprintMode::PaperLiteral), Ratio::new(1, 2));
        assert_eq!(mf2.footprint(FootprintMode::Physical), Ratio::from_integer(1));
        let m2x3 = parse_vector_type("vint32m2x3_t").unwrap();
        assert_eq!(m2x3.footprint(FootprintMode::PaperLiteral), Ratio::from_integer(6));
        let mask = parse_vector_type("vbool64_t").unwrap();
        assert_eq!(mask.footprint(FootprintMode::PaperLiteral), Ratio::from_integer(1));
    }

    #[test]
    fn grammar_enumeration_round_trips() {
        let all = VectorType::enumerate_all();
        for t in &all {
            assert!(t.lmul().ratio() * t.tuple_fields() <= Ratio::from_integer(8) || t.tuple_fields() == 1);
            assert_eq!(parse_vector_type(&t.type_name()), Some(*t));
        }
        // 4+4+3 = 11 (kind, width) pairs; LMUL options per width 7/6/5/4 for 8/16/32/64.
        let singles = all
            .iter()
            .filter(|t| t.tuple_fields() == 1 && t.elem_kind() != ElemKind::Mask)
            .count();
        assert_eq!(singles, 2 * (7 + 6 + 5 + 4) + (6 + 5 + 4));
        assert_eq!(all.iter().filter(|t| t.elem_kind() == ElemKind::Mask).count(), 7);
    }
}
