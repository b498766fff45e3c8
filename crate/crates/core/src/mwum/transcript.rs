use serde::Serialize;
use serde_json::{json, Map, Value};

/// What the oracle returned in an accepted round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Chosen {
    /// A simplex vertex `(s, a, t)` of the dual DP.
    Vertex([usize; 3]),
    /// A generic point `x`.
    Point(Vec<f64>),
}

/// Points that can be written to a transcript.
pub trait TranscriptPoint {
    fn chosen(&self) -> Chosen;
}

impl TranscriptPoint for Vec<f64> {
    fn chosen(&self) -> Chosen {
        Chosen::Point(self.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based round number.
    pub round: usize,
    pub p: Option<Vec<f64>>,
    pub chosen: Option<Chosen>,
    /// Non-zero cost entries `(index, m_i)`; everything else is zero.
    pub m: Vec<(usize, f64)>,
    pub accepted: bool,
}

/// Sequence of `(p, m)` pairs from one MWUM run.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub num_experts: usize,
    pub epsilon: f64,
    pub rounds: Vec<RoundRecord>,
}

impl Transcript {
    pub fn new(num_experts: usize, epsilon: f64) -> Self {
        Transcript {
            num_experts,
            epsilon,
            rounds: Vec::new(),
        }
    }

    /// Dense cost vector of round `k` (0-based).
    pub fn dense_cost(&self, k: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.num_experts];
        for &(i, v) in &self.rounds[k].m {
            m[i] = v;
        }
        m
    }

    /// One JSON object per round. `p` is written only when `include_p` is set
    /// and the round recorded it.
    pub fn to_json_lines(&self, include_p: bool) -> String {
        let mut out = String::new();
        for r in &self.rounds {
            let mut obj = Map::new();
            obj.insert("round".into(), json!(r.round));
            if include_p {
                if let Some(p) = &r.p {
                    obj.insert("p".into(), json!(p));
                }
            }
            match &r.chosen {
                Some(Chosen::Vertex(v)) => {
                    obj.insert("chosen_vertex".into(), json!(v));
                }
                Some(Chosen::Point(x)) => {
                    obj.insert("x".into(), json!(x));
                }
                None => {}
            }
            let m: Vec<Value> = r.m.iter().map(|&(i, v)| json!([i, v])).collect();
            obj.insert("m_sparse".into(), Value::Array(m));
            obj.insert("accepted".into(), json!(r.accepted));
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }
}
