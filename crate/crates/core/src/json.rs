//! JSON file formats used by the command-line tools.
//!
//! ```text
//! matrix:   {"rows":N,"cols":M,"entries":[[re,im],...]}          row-major
//! state:    matrix fields + {"dA":a,"dB":b,"normalized":bool}
//! choi:     matrix fields + {"dIn":d,"dOut":d}
//! ensemble: {"members":[{"w":p,"a":[[re,im],...],"b":[[re,im],...]}]}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::posmaps::ChoiMap;
use crate::qmat::{BipartiteState, ComplexMatrix, C64};
use crate::sepcert::{ProductEnsemble, ProductMember};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateJson {
    #[serde(flatten)]
    pub matrix: MatrixJson,
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
    pub normalized: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChoiJson {
    #[serde(flatten)]
    pub matrix: MatrixJson,
    #[serde(rename = "dIn")]
    pub d_in: usize,
    #[serde(rename = "dOut")]
    pub d_out: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MemberJson {
    pub w: f64,
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EnsembleJson {
    pub members: Vec<MemberJson>,
}

pub fn vec_to_json(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vec_from_json(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixJson { rows: m.rows(), cols: m.cols(), entries: vec_to_json(m.as_slice()) }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = crate::Error;
    fn try_from(j: &MatrixJson) -> Result<Self> {
        ComplexMatrix::from_vec(j.rows, j.cols, vec_from_json(&j.entries))
    }
}

impl From<&BipartiteState> for StateJson {
    fn from(s: &BipartiteState) -> Self {
        StateJson { matrix: s.matrix().into(), d_a: s.d_a(), d_b: s.d_b(), normalized: s.is_normalized() }
    }
}

impl TryFrom<&StateJson> for BipartiteState {
    type Error = crate::Error;
    fn try_from(j: &StateJson) -> Result<Self> {
        let m = ComplexMatrix::try_from(&j.matrix)?;
        if j.normalized {
            BipartiteState::normalized(m, j.d_a, j.d_b)
        } else {
            BipartiteState::unnormalized(m, j.d_a, j.d_b)
        }
    }
}

impl From<&ChoiMap> for ChoiJson {
    fn from(c: &ChoiMap) -> Self {
        ChoiJson { matrix: c.choi().into(), d_in: c.d_in(), d_out: c.d_out() }
    }
}

impl TryFrom<&ChoiJson> for ChoiMap {
    type Error = crate::Error;
    fn try_from(j: &ChoiJson) -> Result<Self> {
        ChoiMap::new(j.d_in, j.d_out, ComplexMatrix::try_from(&j.matrix)?)
    }
}

impl From<&ProductEnsemble> for EnsembleJson {
    fn from(e: &ProductEnsemble) -> Self {
        EnsembleJson {
            members: e
                .members()
                .iter()
                .map(|m| MemberJson { w: m.weight, a: vec_to_json(&m.alice), b: vec_to_json(&m.bob) })
                .collect(),
        }
    }
}

impl TryFrom<&EnsembleJson> for ProductEnsemble {
    type Error = crate::Error;
    fn try_from(j: &EnsembleJson) -> Result<Self> {
        if j.members.is_empty() {
            return invalid("ensemble has no members");
        }
        ProductEnsemble::new(
            j.members
                .iter()
                .map(|m| ProductMember { weight: m.w, alice: vec_from_json(&m.a), bob: vec_from_json(&m.b) })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::max_entangled;

    #[test]
    fn state_json_layout() {
        let s = max_entangled(2, 0).unwrap().projector();
        let text = serde_json::to_string(&StateJson::from(&s)).unwrap();
        assert!(text.starts_with(r#"{"rows":4,"cols":4,"entries":[["#));
        assert!(text.contains(r#""dA":2,"dB":2,"normalized":true"#));
        let back: StateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(BipartiteState::try_from(&back).unwrap(), s);
    }
}
