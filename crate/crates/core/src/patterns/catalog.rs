use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minij::ast::{AssignOp, BinOp, IncDecOp};

const BUILTIN_CATALOG: &str = include_str!("../../data/patterns.toml");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("unknown pattern id '{0}'")]
    UnknownPattern(String),
    #[error("pattern '{0}' listed twice")]
    Duplicate(String),
    #[error("pattern '{0}' has priority 0; priorities start at 1")]
    ZeroPriority(String),
    #[error("pattern '{0}' is filed under {1:?}, expected {2:?}")]
    WrongCategory(String, Category, Category),
    #[error("operator family '{family}': unknown operator '{op}'")]
    UnknownOperator { family: String, op: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    InsertStatement,
    ConditionalExpression,
    DataType,
    FloatDivision,
    LiteralExpression,
    MethodInvocation,
    ReturnStatement,
    Variable,
    MoveStatement,
    RemoveStatement,
    Operators,
}

macro_rules! kinds {
    ($($variant:ident => $id:literal, $cat:ident;)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum PatternKind {
            $($variant,)*
        }

        impl PatternKind {
            pub const ALL: &'static [PatternKind] = &[$(PatternKind::$variant,)*];

            pub fn id(self) -> &'static str {
                match self {
                    $(PatternKind::$variant => $id,)*
                }
            }

            pub fn category(self) -> Category {
                match self {
                    $(PatternKind::$variant => Category::$cat,)*
                }
            }

            pub fn from_id(id: &str) -> Option<PatternKind> {
                match id {
                    $($id => Some(PatternKind::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

kinds! {
    InsertMethodCall => "insert_method_call", InsertStatement;
    InsertReturn => "insert_return", InsertStatement;
    WrapTryCatch => "wrap_try_catch", InsertStatement;
    WrapIf => "wrap_if", InsertStatement;
    RemoveConditionalExpr => "remove_conditional_expr", ConditionalExpression;
    InsertConditionalExpr => "insert_conditional_expr", ConditionalExpression;
    ChangeConditionalOperator => "change_conditional_operator", ConditionalExpression;
    ChangeDeclaredType => "change_declared_type", DataType;
    ChangeCastType => "change_cast_type", DataType;
    FloatDivisorCast => "float_divisor_cast", FloatDivision;
    FloatDividendCast => "float_dividend_cast", FloatDivision;
    FloatMulToIntDiv => "float_mul_to_int_div", FloatDivision;
    ReplaceLiteral => "replace_literal", LiteralExpression;
    ReplaceMethodCall => "replace_method_call", MethodInvocation;
    ReplaceArgument => "replace_argument", MethodInvocation;
    RemoveArgument => "remove_argument", MethodInvocation;
    AddArgument => "add_argument", MethodInvocation;
    ReplaceReturnExpr => "replace_return_expr", ReturnStatement;
    ReplaceVariable => "replace_variable", Variable;
    MoveStatement => "move_statement", MoveStatement;
    RemoveStatement => "remove_statement", RemoveStatement;
    RemoveMethod => "remove_method", RemoveStatement;
    ArithmeticOperator => "arithmetic_operator", Operators;
    AssignmentOperator => "assignment_operator", Operators;
    RelationalOperator => "relational_operator", Operators;
    ConditionalOperator => "conditional_operator", Operators;
    BitwiseOperator => "bitwise_operator", Operators;
    UnaryOperator => "unary_operator", Operators;
    OperandOrder => "operand_order", Operators;
}

impl PatternKind {
    /// The classical mutation operators used by the random baseline.
    pub const BASELINE: &'static [PatternKind] = &[
        PatternKind::ArithmeticOperator,
        PatternKind::AssignmentOperator,
        PatternKind::RelationalOperator,
        PatternKind::ConditionalOperator,
        PatternKind::BitwiseOperator,
        PatternKind::UnaryOperator,
        PatternKind::RemoveStatement,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaultPattern {
    pub kind: PatternKind,
    pub category: Category,
    pub priority: u32,
    pub enabled: bool,
}

impl FaultPattern {
    pub fn pattern_id(&self) -> &'static str {
        self.kind.id()
    }
}

/// Replacement order within each operator family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Families {
    pub arithmetic: Vec<BinOp>,
    pub relational: Vec<BinOp>,
    pub conditional: Vec<BinOp>,
    pub bitwise: Vec<BinOp>,
    pub assignment: Vec<AssignOp>,
    pub increment: Vec<IncDecOp>,
}

impl Families {
    /// Alternatives to `op` in its family, in family order.
    pub fn binary_alternatives(&self, op: BinOp) -> Vec<BinOp> {
        let family = [&self.arithmetic, &self.relational, &self.conditional, &self.bitwise]
            .into_iter()
            .find(|f| f.contains(&op));
        family.map(|f| f.iter().copied().filter(|o| *o != op).collect()).unwrap_or_default()
    }

    pub fn assignment_alternatives(&self, op: AssignOp) -> Vec<AssignOp> {
        self.assignment.iter().copied().filter(|o| *o != op).collect()
    }

    pub fn increment_alternatives(&self, op: IncDecOp) -> Vec<IncDecOp> {
        self.increment.iter().copied().filter(|o| *o != op).collect()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    #[serde(default)]
    pattern: Vec<RawPattern>,
    families: Option<RawFamilies>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPattern {
    id: String,
    category: Category,
    priority: u32,
    #[serde(default = "yes")]
    enabled: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamilies {
    arithmetic: Vec<String>,
    relational: Vec<String>,
    conditional: Vec<String>,
    bitwise: Vec<String>,
    assignment: Vec<String>,
    increment: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    /// Sorted by priority, then table order.
    pub patterns: Vec<FaultPattern>,
    pub families: Families,
}

impl Default for Catalog {
    fn default() -> Catalog {
        Catalog::builtin()
    }
}

impl Catalog {
    pub fn builtin() -> Catalog {
        Catalog::from_toml(BUILTIN_CATALOG).expect("bundled catalog is valid")
    }

    /// Parses a catalog file. Rows may be omitted (they keep their bundled
    /// settings); the families table, when absent, keeps the bundled order.
    pub fn from_toml(text: &str) -> Result<Catalog, CatalogError> {
        let raw: RawCatalog = toml::from_str(text)?;
        let mut rows: BTreeMap<PatternKind, FaultPattern> = BTreeMap::new();
        for p in raw.pattern {
            let kind = PatternKind::from_id(&p.id).ok_or_else(|| CatalogError::UnknownPattern(p.id.clone()))?;
            if p.priority == 0 {
                return Err(CatalogError::ZeroPriority(p.id));
            }
            if p.category != kind.category() {
                return Err(CatalogError::WrongCategory(p.id, p.category, kind.category()));
            }
            let row = FaultPattern { kind, category: p.category, priority: p.priority, enabled: p.enabled };
            if rows.insert(kind, row).is_some() {
                return Err(CatalogError::Duplicate(p.id));
            }
        }
        let base = if rows.len() == PatternKind::ALL.len() && raw.families.is_some() {
            None
        } else {
            Some(Catalog::builtin())
        };
        for &kind in PatternKind::ALL {
            if !rows.contains_key(&kind) {
                let fallback = base.as_ref().and_then(|b| b.pattern(kind)).cloned();
                rows.insert(kind, fallback.expect("bundled catalog lists every pattern"));
            }
        }
        let families = match raw.families {
            Some(f) => parse_families(f)?,
            None => base.expect("bundled catalog loaded").families,
        };
        let mut patterns: Vec<FaultPattern> = rows.into_values().collect();
        patterns.sort_by_key(|p| (p.priority, p.kind));
        Ok(Catalog { patterns, families })
    }

    pub fn load(path: &Path) -> Result<Catalog, CatalogError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CatalogError::Io { path: path.display().to_string(), source })?;
        Catalog::from_toml(&text)
    }

    pub fn pattern(&self, kind: PatternKind) -> Option<&FaultPattern> {
        self.patterns.iter().find(|p| p.kind == kind)
    }

    pub fn is_enabled(&self, kind: PatternKind) -> bool {
        self.pattern(kind).is_some_and(|p| p.enabled)
    }

    pub fn priority(&self, kind: PatternKind) -> u32 {
        self.pattern(kind).map(|p| p.priority).unwrap_or(u32::MAX)
    }

    /// Copy with every pattern outside `kinds` disabled.
    pub fn restricted_to(&self, kinds: &[PatternKind]) -> Catalog {
        let mut c = self.clone();
        for p in &mut c.patterns {
            p.enabled = p.enabled && kinds.contains(&p.kind);
        }
        c
    }

    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        for p in &self.patterns {
            let cat = serde_json::to_value(p.category).expect("category serializes");
            out.push_str(&format!(
                "[[pattern]]\nid = \"{}\"\ncategory = \"{}\"\npriority = {}\nenabled = {}\n\n",
                p.kind.id(),
                cat.as_str().unwrap_or_default(),
                p.priority,
                p.enabled
            ));
        }
        let list = |ops: Vec<&str>| ops.iter().map(|o| format!("\"{o}\"")).collect::<Vec<_>>().join(", ");
        let f = &self.families;
        out.push_str("[families]\n");
        for (name, ops) in [
            ("arithmetic", f.arithmetic.iter().map(|o| o.symbol()).collect()),
            ("relational", f.relational.iter().map(|o| o.symbol()).collect()),
            ("conditional", f.conditional.iter().map(|o| o.symbol()).collect()),
            ("bitwise", f.bitwise.iter().map(|o| o.symbol()).collect()),
            ("assignment", f.assignment.iter().map(|o| o.symbol()).collect()),
            ("increment", f.increment.iter().map(|o| o.symbol()).collect::<Vec<_>>()),
        ] {
            out.push_str(&format!("{name} = [{}]\n", list(ops)));
        }
        out
    }
}

fn parse_families(raw: RawFamilies) -> Result<Families, CatalogError> {
    fn binary(family: &str, ops: Vec<String>, pred: fn(BinOp) -> bool) -> Result<Vec<BinOp>, CatalogError> {
        ops.into_iter()
            .map(|s| {
                BinOp::from_symbol(&s)
                    .filter(|op| pred(*op))
                    .ok_or(CatalogError::UnknownOperator { family: family.into(), op: s })
            })
            .collect()
    }
    let assignment = raw
        .assignment
        .into_iter()
        .map(|s| AssignOp::from_symbol(&s).ok_or(CatalogError::UnknownOperator { family: "assignment".into(), op: s }))
        .collect::<Result<_, _>>()?;
    let increment = raw
        .increment
        .into_iter()
        .map(|s| {
            IncDecOp::ALL
                .into_iter()
                .find(|o| o.symbol() == s)
                .ok_or(CatalogError::UnknownOperator { family: "increment".into(), op: s })
        })
        .collect::<Result<_, _>>()?;
    Ok(Families {
        arithmetic: binary("arithmetic", raw.arithmetic, BinOp::is_arithmetic)?,
        relational: binary("relational", raw.relational, BinOp::is_relational)?,
        conditional: binary("conditional", raw.conditional, BinOp::is_logical)?,
        bitwise: binary("bitwise", raw.bitwise, BinOp::is_bitwise)?,
        assignment,
        increment,
    })
}
