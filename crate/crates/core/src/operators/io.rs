//! Instance files: `[instance]` header plus one section per operator family.
//!
//! ```text
//! [instance]
//! kind = huber
//! dimension = 30
//! mu = 0.0912...
//! lip = 3.87...
//! projection = identity
//! root = 0.12 -0.4 ...
//!
//! [huber]
//! rows = 60
//! cols = 30
//! delta = 1.0
//! a = ...            # row-major
//! b = ...
//! ```
//!
//! Floats use the shortest representation that parses back bit-exactly.

use std::path::Path;

use super::{
    HuberLsqProblem, LinearOperator, Operator, PowerControlGame, ProblemInstance, Projection,
};
use crate::error::{check_dim, Error, Result};
use crate::kv::{KvDoc, KvWriter};

impl ProblemInstance {
    pub fn to_text(&self) -> String {
        let mut w = KvWriter::new();
        w.set("instance", "kind", self.operator.kind_name())
            .set("instance", "dimension", self.dim().to_string())
            .set_f64("instance", "mu", self.mu)
            .set_f64("instance", "lip", self.lip);
        match self.projection {
            Projection::Identity => {
                w.set("instance", "projection", "identity");
            }
            Projection::CappedSimplexBlocks { block, cap } => {
                w.set("instance", "projection", "capped_simplex_blocks")
                    .set("instance", "projection_block", block.to_string())
                    .set_f64("instance", "projection_cap", cap);
            }
        }
        w.set_f64s("instance", "root", &self.root);
        match &self.operator {
            Operator::Linear(op) => {
                w.set("linear", "dim", op.dim.to_string())
                    .set_f64s("linear", "matrix", op.matrix())
                    .set_f64s("linear", "rhs", op.rhs());
            }
            Operator::HuberLsq(p) => {
                w.set("huber", "rows", p.rows().to_string())
                    .set("huber", "cols", p.dim().to_string())
                    .set_f64("huber", "delta", p.delta())
                    .set_f64s("huber", "a", p.matrix())
                    .set_f64s("huber", "b", p.rhs());
            }
            Operator::PowerControl(g) => {
                w.set("power_control", "players", g.players().to_string())
                    .set("power_control", "channels", g.channels().to_string())
                    .set_f64("power_control", "noise_floor", g.noise_floor())
                    .set_f64s("power_control", "direct_gains", g.direct_gains())
                    .set_f64s("power_control", "cross_gains", g.cross_gains());
            }
        }
        w.render()
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let doc = KvDoc::parse(text, origin)?;
        let kind: String = doc.req("instance", "kind")?;
        let dimension: usize = doc.req("instance", "dimension")?;
        let operator = match kind.as_str() {
            "linear" => Operator::Linear(LinearOperator::new(
                doc.req("linear", "dim")?,
                doc.req_list("linear", "matrix")?,
                doc.req_list("linear", "rhs")?,
            )?),
            "huber" => Operator::HuberLsq(HuberLsqProblem::new(
                doc.req("huber", "rows")?,
                doc.req("huber", "cols")?,
                doc.req_list("huber", "a")?,
                doc.req_list("huber", "b")?,
                doc.req("huber", "delta")?,
            )?),
            "power_control" => Operator::PowerControl(PowerControlGame::new(
                doc.req("power_control", "players")?,
                doc.req("power_control", "channels")?,
                doc.req_list("power_control", "direct_gains")?,
                doc.req_list("power_control", "cross_gains")?,
                doc.req("power_control", "noise_floor")?,
            )?),
            other => return Err(doc.err(format!("unknown instance kind `{other}`"))),
        };
        check_dim(dimension, operator.dim())?;
        let projection = match doc.req_str("instance", "projection")? {
            "identity" => Projection::Identity,
            "capped_simplex_blocks" => Projection::CappedSimplexBlocks {
                block: doc.req("instance", "projection_block")?,
                cap: doc.req("instance", "projection_cap")?,
            },
            other => return Err(doc.err(format!("unknown projection `{other}`"))),
        };
        ProblemInstance::from_parts(
            operator,
            doc.req("instance", "mu")?,
            doc.req("instance", "lip")?,
            doc.req_list("instance", "root")?,
            projection,
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ProblemInstance::from_text(&text, &path.display().to_string())
    }
}
