//! JSON schemas for displays, morphisms and reports.

use crate::grammar;
use serde::{Deserialize, Serialize};
use wittcalc_core::display::{Display, Morphism};
use wittcalc_core::frame::Frame;
use wittcalc_core::mat::Mat;
use wittcalc_core::ring::Ring;

pub type WvJson = Vec<String>;

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct DisplayJson {
    pub frame: String,
    pub d: usize,
    /// h x h structure matrix; entries are coordinate-string lists.
    #[serde(rename = "U")]
    pub u: Vec<Vec<WvJson>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct MorphismJson {
    /// (dimension, codimension) of source and target
    pub src: (usize, usize),
    pub dst: (usize, usize),
    #[serde(rename = "A")]
    pub a: Vec<Vec<WvJson>>,
    /// entries are the Verschiebung preimages of the filtration block
    #[serde(rename = "B")]
    pub b: Vec<Vec<WvJson>>,
    #[serde(rename = "B_in_V_coords")]
    pub b_in_v_coords: bool,
    /// kernel coordinates of the B block over a relative frame
    #[serde(rename = "B_log", default, skip_serializing_if = "Option::is_none")]
    pub b_log: Option<Vec<Vec<String>>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<WvJson>>,
    #[serde(rename = "D")]
    pub dmat: Vec<Vec<WvJson>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Provenance {
    pub command: String,
    pub inputs: serde_json::Value,
    pub seed: u64,
    pub version: String,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Report {
    /// "ok" | "obstruction" | "error"
    pub status: String,
    pub result: serde_json::Value,
    pub provenance: Provenance,
    /// excluded from the determinism contract
    pub timing_ms: u128,
}

pub fn display_to_json(d: &Display) -> DisplayJson {
    DisplayJson {
        frame: grammar::frame_to_spec(d.frame()),
        d: d.dim(),
        u: mat_to_json(d.matrix()),
    }
}

fn mat_to_json(m: &wittcalc_core::mat::WMat) -> Vec<Vec<WvJson>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| grammar::witt_to_strings(m.at(i, j)))
                .collect()
        })
        .collect()
}

pub fn display_from_json(j: &DisplayJson) -> grammar::Result<Display> {
    let frame = grammar::parse_frame(&j.frame)?;
    let ring = frame.ring().clone();
    let rows =
        j.u.iter()
            .map(|row| {
                row.iter()
                    .map(|wv| grammar::witt_from_strings(&ring, wv))
                    .collect::<grammar::Result<Vec<_>>>()
            })
            .collect::<grammar::Result<Vec<_>>>()?;
    let u = Mat::from_rows(rows).map_err(|e| e.to_string())?;
    Display::new(frame, u, j.d).map_err(|e| e.to_string())
}

pub fn morphism_to_json(frame: &Frame, m: &Morphism) -> MorphismJson {
    let scalar_block = |mm: &Mat<wittcalc_core::frame::Scalar>| -> Vec<Vec<WvJson>> {
        (0..mm.rows())
            .map(|i| {
                (0..mm.cols())
                    .map(|j| grammar::witt_to_strings(Frame::scalar_rep(mm.at(i, j))))
                    .collect()
            })
            .collect()
    };
    let b = (0..m.b.rows())
        .map(|i| {
            (0..m.b.cols())
                .map(|j| grammar::witt_to_strings(m.b.at(i, j).v_part()))
                .collect()
        })
        .collect();
    let b_log = if frame.is_relative() {
        Some(
            (0..m.b.rows())
                .map(|i| {
                    (0..m.b.cols())
                        .map(|j| {
                            m.b.at(i, j)
                                .log_part()
                                .map(grammar::element_to_string)
                                .unwrap_or_else(|| "0".into())
                        })
                        .collect()
                })
                .collect(),
        )
    } else {
        None
    };
    MorphismJson {
        src: m.src_shape(),
        dst: m.dst_shape(),
        a: scalar_block(&m.a),
        b,
        b_in_v_coords: true,
        b_log,
        c: scalar_block(&m.c),
        dmat: scalar_block(&m.d),
    }
}

pub fn morphism_from_json(frame: &Frame, j: &MorphismJson) -> grammar::Result<Morphism> {
    if !j.b_in_v_coords {
        return Err("B block must be given in V coordinates".into());
    }
    let ring: Ring = frame.ring().clone();
    let scalar_block =
        |rows: &Vec<Vec<WvJson>>| -> grammar::Result<Mat<wittcalc_core::frame::Scalar>> {
            let rows = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|wv| {
                            let v = grammar::witt_from_strings(&ring, wv)?;
                            frame.scalar(v).map_err(|e| e.to_string())
                        })
                        .collect::<grammar::Result<Vec<_>>>()
                })
                .collect::<grammar::Result<Vec<_>>>()?;
            Mat::from_rows(rows).map_err(|e| e.to_string())
        };
    let a = scalar_block(&j.a)?;
    let c = scalar_block(&j.c)?;
    let d = scalar_block(&j.dmat)?;
    let b_rows =
        j.b.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(jj, wv)| {
                        let v = grammar::witt_from_strings(&ring, wv)?;
                        let mut fil = frame.fil_from_v(v).map_err(|e| e.to_string())?;
                        if let Some(logs) = &j.b_log {
                            let log = grammar::parse_element(&ring, &logs[i][jj])?;
                            let log_f = frame.fil_from_log(log).map_err(|e| e.to_string())?;
                            fil = frame.fil_add(&fil, &log_f).map_err(|e| e.to_string())?;
                        }
                        Ok(fil)
                    })
                    .collect::<grammar::Result<Vec<_>>>()
            })
            .collect::<grammar::Result<Vec<_>>>()?;
    let b = Mat::from_rows(b_rows).map_err(|e| e.to_string())?;
    Morphism::new(j.src, j.dst, a, b, c, d).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_json_round_trip() {
        let frame = grammar::parse_frame("WF(Fq(p=2,k=2); N=4)").unwrap();
        let d = wittcalc_core::selftest::supersingular(&frame).unwrap();
        let j = display_to_json(&d);
        let text = serde_json::to_string(&j).unwrap();
        let back: DisplayJson = serde_json::from_str(&text).unwrap();
        let d2 = display_from_json(&back).unwrap();
        assert_eq!(d.matrix(), d2.matrix());
        assert_eq!(d.dim(), d2.dim());
    }

    #[test]
    fn morphism_json_round_trip() {
        let frame = grammar::parse_frame("WF(Fq(p=2,k=2); N=4)").unwrap();
        let m = wittcalc_core::selftest::verschiebung_isogeny(&frame).unwrap();
        let j = morphism_to_json(&frame, &m);
        let text = serde_json::to_string(&j).unwrap();
        let back: MorphismJson = serde_json::from_str(&text).unwrap();
        let m2 = morphism_from_json(&frame, &back).unwrap();
        assert_eq!(m, m2);
    }
}
