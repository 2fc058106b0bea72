//! Line-oriented circuit format:
//!
//! ```text
//! # sites=3
//! Hopping 0.5 @ 0,1
//! SqrtISwapDagger @ 1,2
//! PhasedXZ 0.0,0.25,-1.0 @ 2
//! ```
//!
//! Floats are written in shortest round-trip form, so parsing the output
//! reproduces every parameter bit for bit.

use std::fmt::Write as _;

use super::{Circuit, Gate, GateKind, Sites};
use crate::error::{Result, SimError};

impl Circuit {
    pub fn to_text(&self) -> String {
        let mut out = format!("# sites={}\n", self.n_sites());
        for g in self.gates() {
            out.push_str(g.kind.name());
            let params = g.kind.params();
            if !params.is_empty() {
                out.push(' ');
                let joined: Vec<String> = params.iter().map(|p| format!("{p:?}")).collect();
                out.push_str(&joined.join(","));
            }
            match g.sites {
                Sites::One(a) => write!(out, " @ {a}").unwrap(),
                Sites::Two(a, b) => write!(out, " @ {a},{b}").unwrap(),
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_sites = None;
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let perr = |msg: String| SimError::Parse { line: line_no, msg };
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("sites=") {
                    if n_sites.is_some() {
                        return Err(perr("duplicate sites header".into()));
                    }
                    n_sites = Some(v.trim().parse::<usize>().map_err(|e| perr(e.to_string()))?);
                }
                continue;
            }
            let (lhs, rhs) = line
                .split_once('@')
                .ok_or_else(|| perr("missing '@ sites'".into()))?;
            let lhs = lhs.trim();
            let (name, params) = match lhs.split_once(char::is_whitespace) {
                Some((n, p)) => (n, p.trim()),
                None => (lhs, ""),
            };
            let params: Vec<f64> = if params.is_empty() {
                Vec::new()
            } else {
                params
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|e| perr(format!("bad parameter {p:?}: {e}")))
                    })
                    .collect::<Result<_>>()?
            };
            let sites: Vec<usize> = rhs
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|e| perr(format!("bad site {s:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            let kind =
                GateKind::from_name_params(name, &params).map_err(|e| perr(e.to_string()))?;
            let gate = match (kind.arity(), sites.as_slice()) {
                (1, &[a]) => Gate::one(kind, a),
                (2, &[a, b]) => Gate::two(kind, a, b),
                _ => return Err(perr(format!("{name} expects {} site(s)", kind.arity()))),
            };
            gates.push((line_no, gate));
        }
        let n_sites = n_sites.ok_or(SimError::Parse {
            line: 1,
            msg: "missing '# sites=L' header".into(),
        })?;
        let mut c = Circuit::new(n_sites);
        for (line, g) in gates {
            c.push(g).map_err(|e| SimError::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::NoiseParams;

    #[test]
    fn round_trip_every_kind() {
        let np = NoiseParams {
            theta: 0.1,
            zeta: -0.2,
            chi: 1e-17,
            gamma: 3.0,
            phi: -0.0,
        };
        let gates = vec![
            Gate::one(
                GateKind::PhasedXZ {
                    a: 0.1,
                    x: 1.0 / 3.0,
                    z: -2.5e-9,
                },
                0,
            ),
            Gate::two(GateKind::SqrtISwapDagger, 0, 2),
            Gate::two(GateKind::Hopping(std::f64::consts::PI), 2, 1),
            Gate::two(GateKind::CPhase(-0.1), 1, 0),
            Gate::one(GateKind::Rz(f64::MIN_POSITIVE), 1),
            Gate::one(GateKind::Rx(1e300), 2),
            Gate::two(GateKind::GeneralNC(np), 0, 1),
            Gate::two(GateKind::GeneralNCDagger(np), 1, 2),
        ];
        let c = Circuit::from_gates(3, gates).unwrap();
        let text = c.to_text();
        let back = Circuit::from_text(&text).unwrap();
        assert_eq!(back, c);
        for (g, h) in c.gates().iter().zip(back.gates()) {
            let bits = |k: &GateKind| k.params().iter().map(|p| p.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&g.kind), bits(&h.kind));
        }
        assert!(text.contains("SqrtISwapDagger @ 0,2\n"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Circuit::from_text("# sites=2\nRz 0.1 @ 0\nBogus @ 1\n").unwrap_err();
        assert_eq!(
            err,
            SimError::Parse {
                line: 3,
                msg: "unsupported gate: Bogus".into()
            }
        );
        let err = Circuit::from_text("# sites=2\nRz 0.1 @ 5\n").unwrap_err();
        assert!(matches!(err, SimError::Parse { line: 2, .. }));
        assert!(Circuit::from_text("Rz 0.1 @ 0\n").is_err());
        assert!(Circuit::from_text("# sites=2\nHopping 0.1 @ 0\n").is_err());
    }
}
