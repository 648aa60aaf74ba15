//! Request and response types shared by the HTTP service and its clients,
//! and the synchronous handlers behind them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::diagrams::{BasisBounds, Word};
use crate::expr::parse_combination;
use crate::json::{basis_to_json, morphism_from_json, morphism_to_json, reports_to_json, walled_brauer_to_json, SCHEMA};
use crate::quotients::{walled_brauer_algebra, Category, Session};
use crate::reps::{Pyramid, Rep, RepKind};
use crate::scalars::{MonicPoly, Poly};
use crate::verify::{self, SUITES};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApiError {
    /// Bad input: unknown flags, type errors, unsupported combinations.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, ApiError> {
    Err(ApiError::Usage(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Ob,
    Aob,
    Gob,
    Obf,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "ob" => Ok(Mode::Ob),
            "aob" => Ok(Mode::Aob),
            "gob" => Ok(Mode::Gob),
            "obf" => Ok(Mode::Obf),
            _ => Err(format!("unknown mode `{s}`; expected ob, aob, gob or obf")),
        }
    }
}

/// Which category to compute in. Scalars are written as text (`"5"`,
/// `"1/2"`, `"D1"`, `"m1 - 2"`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct CategorySpec {
    pub mode: Mode,
    /// Cyclotomic polynomial in `u`, for `obf` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    /// Bubble values: the loop value in `ob` and `gob`, `D1, D2, ...` otherwise.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta: Vec<String>,
    /// Truncation level for `gob`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
}

fn scalar(s: &str) -> Result<Poly, ApiError> {
    Poly::parse(s).map_err(|e| ApiError::Usage(format!("bad scalar `{s}`: {e}")))
}

fn scalars(v: &[String]) -> Result<Vec<Poly>, ApiError> {
    v.iter().map(|s| scalar(s)).collect()
}

fn word(s: &str) -> Result<Word, ApiError> {
    Word::parse(s).map_err(|e| ApiError::Usage(e.to_string()))
}

impl CategorySpec {
    pub fn category(&self) -> Result<Category, ApiError> {
        if self.f.is_some() && self.mode != Mode::Obf {
            return usage("--f only applies to --mode obf");
        }
        if self.level.is_some() && self.mode != Mode::Gob {
            return usage("--level only applies to --mode gob");
        }
        let single = |what: &str| -> Result<Poly, ApiError> {
            match self.delta.len() {
                0 => Ok(Poly::delta(1)),
                1 => scalar(&self.delta[0]),
                n => usage(format!("{what} takes a single loop value in --delta, got {n}")),
            }
        };
        Ok(match self.mode {
            Mode::Ob => Category::Ob { delta: single("ob")? },
            Mode::Gob => {
                if self.level == Some(0) {
                    return usage("--level must be at least 1");
                }
                Category::Gob { ell: self.level, delta: single("gob")? }
            }
            Mode::Aob => Category::Aob {
                values: (!self.delta.is_empty()).then(|| scalars(&self.delta)).transpose()?,
            },
            Mode::Obf => {
                let Some(text) = &self.f else {
                    return usage("--mode obf needs --f <monic polynomial in u>");
                };
                let f = MonicPoly::parse(text).map_err(|e| ApiError::Usage(format!("bad --f `{text}`: {e}")))?;
                if f.degree() == 0 {
                    return usage("--f must have degree at least 1");
                }
                if !self.delta.is_empty() && self.delta.len() != f.degree() {
                    return usage(format!(
                        "--mode obf with f of degree {} takes {} values in --delta, got {}",
                        f.degree(),
                        f.degree(),
                        self.delta.len()
                    ));
                }
                Category::Cyclotomic {
                    values: (!self.delta.is_empty()).then(|| scalars(&self.delta)).transpose()?,
                    f,
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeRequest {
    #[serde(flatten)]
    pub category: CategorySpec,
    pub expr: String,
}

/// `left . right`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposeRequest {
    #[serde(flatten)]
    pub category: CategorySpec,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisRequest {
    #[serde(flatten)]
    pub category: CategorySpec,
    pub src: String,
    pub tgt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dots: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
}

/// Structure constants of `End(↑^r ↓^s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructRequest {
    #[serde(flatten)]
    pub category: CategorySpec,
    pub r: usize,
    pub s: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRequest {
    /// Suite names, or `["all"]`.
    pub suites: Vec<String>,
    pub lambda: Vec<u32>,
    #[serde(default)]
    pub seed: u64,
}

/// Rank of the images of the normal basis of `Hom(src, tgt)` in the
/// cyclotomic quotient of level `len(lambda)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRequest {
    pub lambda: Vec<u32>,
    /// Parameter values; symbolic when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m: Vec<String>,
    pub src: String,
    pub tgt: String,
    #[serde(default)]
    pub seed: u64,
}

/// Holds certified sessions, one per category.
#[derive(Default)]
pub struct Workspace {
    sessions: Mutex<HashMap<CategorySpec, Arc<Session>>>,
}

impl Workspace {
    pub fn new() -> Workspace {
        Workspace::default()
    }

    pub fn session(&self, spec: &CategorySpec) -> Result<Arc<Session>, ApiError> {
        let category = spec.category()?;
        if let Some(s) = self.sessions.lock().unwrap().get(spec) {
            return Ok(s.clone());
        }
        let s = Arc::new(Session::new(category).map_err(|e| ApiError::Internal(e.to_string()))?);
        self.sessions.lock().unwrap().insert(spec.clone(), s.clone());
        Ok(s)
    }

    /// An expression, or a morphism in the canonical JSON form.
    fn eval(&self, session: &Session, expr: &str) -> Result<crate::diagrams::Morphism, ApiError> {
        if expr.trim_start().starts_with('{') {
            let v: Value = serde_json::from_str(expr).map_err(|e| ApiError::Usage(e.to_string()))?;
            let m = morphism_from_json(&v).map_err(|e| ApiError::Usage(e.to_string()))?;
            return session
                .normalize_sum(&m.slice_terms(), &m.src, &m.tgt)
                .map_err(|e| ApiError::Usage(e.to_string()));
        }
        let c = parse_combination(expr).map_err(|e| ApiError::Usage(format!("in `{expr}`: {e}")))?;
        session
            .normalize_sum(&c.terms, &c.src, &c.tgt)
            .map_err(|e| ApiError::Usage(e.to_string()))
    }

    pub fn normalize(&self, req: &NormalizeRequest) -> Result<Value, ApiError> {
        let s = self.session(&req.category)?;
        Ok(morphism_to_json(&self.eval(&s, &req.expr)?))
    }

    pub fn compose(&self, req: &ComposeRequest) -> Result<Value, ApiError> {
        let s = self.session(&req.category)?;
        let (f, g) = (self.eval(&s, &req.left)?, self.eval(&s, &req.right)?);
        if f.src != g.tgt {
            return usage(format!("cannot compose {} -> {} after {} -> {}", f.src, f.tgt, g.src, g.tgt));
        }
        let h = s.compose(&f, &g).map_err(|e| ApiError::Usage(e.to_string()))?;
        Ok(morphism_to_json(&h))
    }

    pub fn basis(&self, req: &BasisRequest) -> Result<Value, ApiError> {
        let s = self.session(&req.category)?;
        let (a, b) = (word(&req.src)?, word(&req.tgt)?);
        let bounds = match (req.max_dots, req.max_degree) {
            (None, None) => None,
            (d, t) => Some(BasisBounds {
                max_dots_per_strand: d,
                max_total_degree: t,
                ..Default::default()
            }),
        };
        if bounds.is_some() && s.category.dot_bound().is_some() {
            return usage(format!(
                "--max-dots and --max-degree only apply to infinite categories, not {}",
                s.category.name()
            ));
        }
        let basis = s.basis(&a, &b, bounds).map_err(|e| ApiError::Usage(e.to_string()))?;
        Ok(basis_to_json(&a, &b, &basis))
    }

    pub fn dims(&self, req: &BasisRequest) -> Result<Value, ApiError> {
        let v = self.basis(req)?;
        Ok(json!({"schema": SCHEMA, "src": v["src"], "tgt": v["tgt"], "dim": v["dim"]}))
    }

    pub fn structconst(&self, req: &StructRequest) -> Result<Value, ApiError> {
        let s = self.session(&req.category)?;
        if req.r + req.s > 6 {
            return usage("r + s is limited to 6");
        }
        let b = walled_brauer_algebra(&s, req.r, req.s).map_err(|e| ApiError::Usage(e.to_string()))?;
        Ok(walled_brauer_to_json(s.category.name(), &b))
    }

    /// The report carries `"passed"`.
    pub fn verify(&self, req: &VerifyRequest) -> Result<Value, ApiError> {
        Pyramid::new(&req.lambda).map_err(|e| ApiError::Usage(e.to_string()))?;
        let names: Vec<&str> = if req.suites.iter().any(|s| s == "all") {
            SUITES.to_vec()
        } else {
            req.suites.iter().map(String::as_str).collect()
        };
        let Some(reports) = verify::run_suites(&names, &req.lambda, req.seed) else {
            return usage(format!("unknown suite; expected one of: all, {}", SUITES.join(", ")));
        };
        Ok(reports_to_json(&reports))
    }

    /// `"passed"` is true when the rank equals the basis count.
    pub fn rank(&self, req: &RankRequest) -> Result<Value, ApiError> {
        let p = Pyramid::new(&req.lambda).map_err(|e| ApiError::Usage(e.to_string()))?;
        let m = if req.m.is_empty() {
            (1..=p.ell() as u32).map(Poly::m).collect()
        } else {
            scalars(&req.m)?
        };
        if m.len() != p.ell() {
            return usage(format!("--m needs {} values, one per column", p.ell()));
        }
        let rep = Rep::new(p, m, RepKind::PsiLambda).map_err(|e| ApiError::Usage(e.to_string()))?;
        let (a, b) = (word(&req.src)?, word(&req.tgt)?);
        let (count, rank) = verify::basis_rank(&a, &b, &rep, req.seed).map_err(ApiError::Usage)?;
        Ok(json!({
            "schema": SCHEMA,
            "src": a.to_string(),
            "tgt": b.to_string(),
            "count": count,
            "rank": rank,
            "passed": count == rank,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(mode: Mode) -> CategorySpec {
        CategorySpec { mode, ..Default::default() }
    }

    #[test]
    fn incompatible_flags() {
        let mut s = spec(Mode::Ob);
        s.f = Some("u-1".into());
        assert!(matches!(s.category(), Err(ApiError::Usage(_))));
        assert!(matches!(spec(Mode::Obf).category(), Err(ApiError::Usage(_))));
        let mut s = spec(Mode::Obf);
        s.f = Some("u^2-1".into());
        s.delta = vec!["1".into()];
        assert!(matches!(s.category(), Err(ApiError::Usage(_))));
    }

    #[test]
    fn dims_of_level_two() {
        let ws = Workspace::new();
        let mut s = spec(Mode::Obf);
        s.f = Some("u^2-1".into());
        let req = BasisRequest { category: s, src: "^v".into(), tgt: "^v".into(), max_dots: None, max_degree: None };
        assert_eq!(ws.dims(&req).unwrap()["dim"], json!(8));
    }

    #[test]
    fn loop_in_ob() {
        let ws = Workspace::new();
        let mut s = spec(Mode::Ob);
        s.delta = vec!["5".into()];
        let v = ws.normalize(&NormalizeRequest { category: s, expr: "d' . c".into() }).unwrap();
        assert_eq!(v["terms"][0]["coeff"], json!(5));
    }

    #[test]
    fn requests_use_flat_category_fields() {
        let r: NormalizeRequest = serde_json::from_value(json!({"mode": "obf", "f": "u-2", "expr": "x"})).unwrap();
        assert_eq!(r.category.mode, Mode::Obf);
        assert_eq!(serde_json::to_value(&r).unwrap(), json!({"mode": "obf", "f": "u-2", "expr": "x"}));
    }
}
