//! The eight shipped decompositions.
//!
//! Each fixture is built here from its defining data and also shipped as a
//! JSON file under `fixtures/`; tests keep the two in sync.

use crate::algebra::{Conductor, CycloNumber, QuadraticForm};
use crate::decomposition::{Decomposition, Term};
use crate::error::{Error, Result};
use crate::stabilizer::{CanonicalStabilizer, MagicId, MagicTarget};

pub const FIXTURE_NAMES: [&str; 8] = [
    "strange_m2",
    "strange_m3",
    "h3_m2",
    "h3_m3",
    "norrell_m2",
    "norrell_m3",
    "norrell_m4",
    "qubit_t_m4",
];

/// Shipped JSON text of a fixture.
pub fn fixture_json(name: &str) -> Option<&'static str> {
    Some(match name {
        "strange_m2" => include_str!("../../fixtures/strange_m2.json"),
        "strange_m3" => include_str!("../../fixtures/strange_m3.json"),
        "h3_m2" => include_str!("../../fixtures/h3_m2.json"),
        "h3_m3" => include_str!("../../fixtures/h3_m3.json"),
        "norrell_m2" => include_str!("../../fixtures/norrell_m2.json"),
        "norrell_m3" => include_str!("../../fixtures/norrell_m3.json"),
        "norrell_m4" => include_str!("../../fixtures/norrell_m4.json"),
        "qubit_t_m4" => include_str!("../../fixtures/qubit_t_m4.json"),
        _ => return None,
    })
}

/// Load a shipped fixture file.
pub fn load(name: &str) -> Result<Decomposition> {
    let text = fixture_json(name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown fixture {name:?}")))?;
    Ok(serde_json::from_str(text)?)
}

pub fn all() -> Result<Vec<(&'static str, Decomposition)>> {
    FIXTURE_NAMES.iter().map(|&n| Ok((n, load(n)?))).collect()
}

fn q(p: u8, k: usize, quad: &[(usize, usize, u8)], lin: &[u8]) -> QuadraticForm {
    QuadraticForm::new(p, k, quad, lin, 0).expect("fixture form")
}

fn st(p: u8, x0: &[u8], cols: &[&[u8]], form: QuadraticForm) -> CanonicalStabilizer {
    let cols: Vec<Vec<u8>> = cols.iter().map(|c| c.to_vec()).collect();
    CanonicalStabilizer::from_parts(p, x0, &cols, form).expect("fixture state")
}

fn r(n: i64, d: i64) -> CycloNumber {
    CycloNumber::from_ratio(Conductor::N24, n, d)
}

fn dec(
    id: MagicId,
    m: usize,
    n_power: u32,
    terms: Vec<(CycloNumber, CanonicalStabilizer)>,
) -> Decomposition {
    Decomposition {
        target: MagicTarget::new(id, m).expect("m >= 1"),
        n_power,
        terms: terms
            .into_iter()
            .map(|(coeff, state)| Term { coeff, state })
            .collect(),
    }
}

const E0: &[u8] = &[1, 0, 0];
const E1: &[u8] = &[0, 1, 0];
const E2: &[u8] = &[0, 0, 1];

/// c = (√3 − 1)/2
fn h3_c() -> CycloNumber {
    (CycloNumber::sqrt3() - r(1, 1)) * r(1, 2)
}

/// Construct a fixture from its defining data.
pub fn build(name: &str) -> Result<Decomposition> {
    let w = CycloNumber::omega;
    let s3 = CycloNumber::sqrt3;
    let s6 = CycloNumber::sqrt6;
    let i = CycloNumber::imag_unit;
    let xi = CycloNumber::xi;
    Ok(match name {
        "strange_m2" => {
            let c = i() * s3() * w() * r(-1, 2);
            let id2: &[&[u8]] = &[&[1, 0], &[0, 1]];
            dec(
                MagicId::S,
                2,
                0,
                vec![
                    (
                        c.clone(),
                        st(
                            3,
                            &[0, 0],
                            id2,
                            q(3, 2, &[(0, 0, 1), (0, 1, 1), (1, 1, 1)], &[0, 0]),
                        ),
                    ),
                    (
                        -c,
                        st(
                            3,
                            &[0, 0],
                            id2,
                            q(3, 2, &[(0, 0, 1), (0, 1, 2), (1, 1, 1)], &[0, 0]),
                        ),
                    ),
                ],
            )
        }
        "strange_m3" => {
            let alpha = strange_m3_alpha();
            let beta = i() * s6() * r(-1, 4);
            let cols: &[&[u8]] = &[E0, E2];
            dec(
                MagicId::S,
                3,
                0,
                vec![
                    (
                        alpha.clone(),
                        st(
                            3,
                            &[0, 2, 0],
                            cols,
                            q(3, 2, &[(0, 0, 1), (0, 1, 1)], &[0, 0]),
                        ),
                    ),
                    (
                        beta.clone(),
                        st(
                            3,
                            &[0, 1, 0],
                            cols,
                            q(3, 2, &[(0, 0, 2), (0, 1, 1), (1, 1, 1)], &[0, 0]),
                        ),
                    ),
                    (
                        -alpha,
                        st(
                            3,
                            &[0, 2, 0],
                            cols,
                            q(3, 2, &[(0, 0, 1), (0, 1, 2)], &[0, 0]),
                        ),
                    ),
                    (
                        -beta,
                        st(
                            3,
                            &[0, 1, 0],
                            cols,
                            q(3, 2, &[(0, 0, 2), (0, 1, 2), (1, 1, 1)], &[0, 0]),
                        ),
                    ),
                ],
            )
        }
        "h3_m2" => {
            let c = h3_c();
            let pre = &c * &s3();
            let one = r(1, 1);
            dec(
                MagicId::H3,
                2,
                2,
                vec![
                    (
                        &pre * &(&one - &(&c * &w())),
                        st(3, &[0, 0], &[&[0, 1]], q(3, 1, &[], &[0])),
                    ),
                    (
                        &pre * &(&one - &(&c * &w().pow(2))),
                        st(3, &[0, 0], &[&[1, 0]], q(3, 1, &[], &[0])),
                    ),
                    (
                        c.pow(2) * r(3, 1),
                        st(
                            3,
                            &[0, 0],
                            &[&[1, 0], &[0, 1]],
                            q(3, 2, &[(0, 0, 2), (1, 1, 1)], &[0, 0]),
                        ),
                    ),
                ],
            )
        }
        "h3_m3" => {
            let c = h3_c();
            let one = r(1, 1);
            let id3: &[&[u8]] = &[E0, E1, E2];
            dec(
                MagicId::H3,
                3,
                1,
                vec![
                    (
                        &c * &(&one + &i()) * r(3, 4),
                        st(
                            3,
                            &[0, 0, 0],
                            id3,
                            q(3, 3, &[(0, 0, 2), (1, 1, 2), (2, 2, 1)], &[0, 0, 0]),
                        ),
                    ),
                    (
                        &c * &(&one - &i()) * r(3, 4),
                        st(
                            3,
                            &[0, 0, 0],
                            id3,
                            q(3, 3, &[(0, 0, 1), (1, 1, 1), (2, 2, 2)], &[0, 0, 0]),
                        ),
                    ),
                    (r(3, 4), st(3, &[0, 0, 0], &[E2], q(3, 1, &[], &[0]))),
                    (r(3, 4), st(3, &[0, 0, 0], &[E0, E1], q(3, 2, &[], &[0, 0]))),
                ],
            )
        }
        "norrell_m2" => {
            let id2: &[&[u8]] = &[&[1, 0], &[0, 1]];
            dec(
                MagicId::N,
                2,
                0,
                vec![
                    (
                        w() * r(-1, 2),
                        st(3, &[0, 0], id2, q(3, 2, &[(0, 1, 1)], &[1, 1])),
                    ),
                    (r(1, 1), CanonicalStabilizer::basis(3, &[2, 2])?),
                    (
                        w().pow(2) * r(-1, 2),
                        st(3, &[0, 0], id2, q(3, 2, &[(0, 1, 2)], &[2, 2])),
                    ),
                ],
            )
        }
        "norrell_m3" => {
            let a = s6() * r(-1, 4);
            let b = CycloNumber::sqrt2() * r(1, 4);
            dec(
                MagicId::N,
                3,
                0,
                vec![
                    (
                        a.clone(),
                        st(
                            3,
                            &[2, 0, 0],
                            &[E1, E2],
                            q(3, 2, &[(0, 0, 2), (1, 1, 1)], &[1, 2]),
                        ),
                    ),
                    (
                        a.clone(),
                        st(
                            3,
                            &[0, 2, 0],
                            &[E0, E2],
                            q(3, 2, &[(0, 0, 1), (1, 1, 2)], &[2, 1]),
                        ),
                    ),
                    (b, CanonicalStabilizer::plus(3, 3)),
                    (
                        a,
                        st(
                            3,
                            &[0, 0, 2],
                            &[E0, E1],
                            q(3, 2, &[(0, 0, 2), (1, 1, 1)], &[1, 2]),
                        ),
                    ),
                ],
            )
        }
        "norrell_m4" => {
            let tau = s3() * r(1, 4);
            let tw = &tau * &w();
            let tx = &tau * &xi();
            let e = |j: usize| -> Vec<u8> { (0..4).map(|t| u8::from(t == j)).collect() };
            let (e0, e1, e2, e3) = (e(0), e(1), e(2), e(3));
            dec(
                MagicId::N,
                4,
                0,
                vec![
                    (
                        tw.clone(),
                        st(
                            3,
                            &[0, 2, 0, 0],
                            &[&e0, &e2, &e3],
                            q(3, 3, &[(0, 0, 1), (1, 1, 2), (2, 2, 1)], &[2, 1, 2]),
                        ),
                    ),
                    (
                        tx.clone(),
                        st(
                            3,
                            &[0, 0, 0, 0],
                            &[&e0, &e1, &e2, &e3],
                            q(
                                3,
                                4,
                                &[(0, 0, 1), (1, 1, 1), (2, 2, 2), (3, 3, 2)],
                                &[2, 2, 1, 1],
                            ),
                        ),
                    ),
                    (
                        tx.clone(),
                        st(
                            3,
                            &[2, 0, 0, 2],
                            &[&e1, &e2],
                            q(3, 2, &[(0, 0, 2), (1, 1, 2)], &[1, 1]),
                        ),
                    ),
                    (
                        tx.clone(),
                        st(
                            3,
                            &[0, 0, 2, 2],
                            &[&e0, &e1],
                            q(3, 2, &[(0, 0, 1), (1, 1, 2)], &[2, 1]),
                        ),
                    ),
                    (
                        tw,
                        st(
                            3,
                            &[2, 0, 0, 0],
                            &[&e1, &e2, &e3],
                            q(3, 3, &[(0, 0, 1), (1, 1, 1), (2, 2, 2)], &[2, 2, 1]),
                        ),
                    ),
                    (
                        tx,
                        st(
                            3,
                            &[0, 2, 2, 0],
                            &[&e0, &e3],
                            q(3, 2, &[(0, 0, 2), (1, 1, 1)], &[1, 2]),
                        ),
                    ),
                    (w().pow(2) * r(1, 4), CanonicalStabilizer::plus(3, 4)),
                ],
            )
        }
        "qubit_t_m4" => {
            let z = |j: i64| CycloNumber::zeta_pow(Conductor::N24, j) * r(2, 3);
            dec(
                MagicId::T,
                4,
                0,
                vec![
                    (
                        z(1),
                        st(
                            2,
                            &[0, 0, 0, 0],
                            &[&[1, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]],
                            q(2, 3, &[(1, 2, 1)], &[1, 0, 0]),
                        ),
                    ),
                    (
                        z(0),
                        st(
                            2,
                            &[0, 0, 0, 0],
                            &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]],
                            q(2, 4, &[(0, 2, 1), (1, 3, 1)], &[0, 1, 0, 1]),
                        ),
                    ),
                    (
                        z(-1),
                        st(
                            2,
                            &[0, 0, 0, 0],
                            &[&[1, 0, 0, 0], &[0, 1, 0, 1], &[0, 0, 1, 0]],
                            q(2, 3, &[(0, 2, 1)], &[1, 1, 1]),
                        ),
                    ),
                ],
            )
        }
        _ => return Err(Error::InvalidInput(format!("unknown fixture {name:?}"))),
    })
}

/// `(3√2 − i√6)/8`, the rational-coefficient form of `(√6/4) e^{−iπ/6}`.
pub fn strange_m3_alpha() -> CycloNumber {
    (CycloNumber::sqrt2() * r(3, 1) - CycloNumber::imag_unit() * CycloNumber::sqrt6()) * r(1, 8)
}
