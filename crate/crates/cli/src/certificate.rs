//! Canonical certificate text.
//!
//! ```text
//! delsarte-certificate 1
//! structure <sha256>
//! region <sha256>
//! sigma <sha256>
//! arithmetic exact
//! atom 2 - -1/3
//! alpha 1/3
//! recheck 4
//! end
//! ```
//!
//! Atom lines are sorted by point index; `-` marks the `M*` part and `+` the
//! `L*` part, and weights keep their own sign.

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};

use delsarte_core::dual::{Atom, DualCertificate};
use delsarte_core::exact::{parse_exact, ExactReal};
use delsarte_core::primal::SigmaWeight;
use delsarte_core::regions::RegionPair;
use delsarte_core::scalar::{parse_rational, Scalar};
use delsarte_core::spectra::SphericalStructure;

use crate::config::Arith;

pub const CERTIFICATE_VERSION: u32 = 1;

/// Scalars with a text form that round-trips.
pub trait TextScalar: Scalar {
    const ARITH: Arith;
    fn parse_text(text: &str) -> Option<Self>;
}

impl TextScalar for f64 {
    const ARITH: Arith = Arith::Float;

    fn parse_text(text: &str) -> Option<Self> {
        let text = text.trim();
        text.parse::<f64>()
            .ok()
            .or_else(|| parse_rational(text).map(|r| f64::from_rational(&r)))
            .filter(|v| v.is_finite())
    }
}

impl TextScalar for ExactReal {
    const ARITH: Arith = Arith::Exact;

    fn parse_text(text: &str) -> Option<Self> {
        parse_exact(text)
    }
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceHashes {
    pub structure: String,
    pub region: String,
    pub sigma: String,
}

impl InstanceHashes {
    pub fn of<S: Scalar>(structure: &SphericalStructure<S>, region: &RegionPair, sigma: &SigmaWeight<S>) -> Self {
        let grid = structure.grid().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        InstanceHashes {
            structure: sha256_hex(&format!("{}|{grid}", structure.kind().canonical())),
            region: sha256_hex(&region.canonical()),
            sigma: sha256_hex(&sigma.canonical()),
        }
    }
}

pub fn arith_name(a: Arith) -> &'static str {
    match a {
        Arith::Exact => "exact",
        Arith::Float => "float",
    }
}

pub fn write_certificate<S: TextScalar>(hashes: &InstanceHashes, cert: &DualCertificate<S>) -> String {
    let mut atoms: Vec<(usize, char, &S)> = cert
        .mu_minus
        .iter()
        .map(|a| (a.point, '-', &a.weight))
        .chain(cert.mu_plus.iter().map(|a| (a.point, '+', &a.weight)))
        .collect();
    atoms.sort_by_key(|a| (a.0, a.1));
    let mut out = format!(
        "delsarte-certificate {CERTIFICATE_VERSION}\nstructure {}\nregion {}\nsigma {}\narithmetic {}\n",
        hashes.structure,
        hashes.region,
        hashes.sigma,
        arith_name(S::ARITH)
    );
    for (point, part, w) in atoms {
        out.push_str(&format!("atom {point} {part} {}\n", w.to_text()));
    }
    out.push_str(&format!("alpha {}\nrecheck {}\nend\n", cert.alpha.to_text(), cert.recheck_factor));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateHeader {
    pub hashes: InstanceHashes,
    pub arithmetic: Arith,
}

/// Read only the header, to pick the scalar type.
pub fn read_header(text: &str) -> Result<CertificateHeader> {
    let mut lines = text.lines();
    let first = lines.next().ok_or_else(|| anyhow!("empty certificate"))?;
    let version = first
        .strip_prefix("delsarte-certificate ")
        .ok_or_else(|| anyhow!("not a certificate: first line is {first:?}"))?;
    if version.trim() != CERTIFICATE_VERSION.to_string() {
        bail!("unsupported certificate version {version}");
    }
    let mut field = |key: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| anyhow!("certificate ends before `{key}`"))?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .map(|v| v.trim().to_string())
            .ok_or_else(|| anyhow!("expected `{key}`, found {line:?}"))
    };
    let hashes = InstanceHashes { structure: field("structure")?, region: field("region")?, sigma: field("sigma")? };
    let arithmetic = match field("arithmetic")?.as_str() {
        "exact" => Arith::Exact,
        "float" => Arith::Float,
        other => bail!("unknown arithmetic {other:?}"),
    };
    Ok(CertificateHeader { hashes, arithmetic })
}

pub fn parse_certificate<S: TextScalar>(text: &str) -> Result<(CertificateHeader, DualCertificate<S>)> {
    let header = read_header(text)?;
    if header.arithmetic != S::ARITH {
        bail!("certificate arithmetic does not match the requested scalar type");
    }
    let mut mu_minus = Vec::new();
    let mut mu_plus = Vec::new();
    let mut alpha = None;
    let mut recheck = None;
    let mut ended = false;
    for (n, line) in text.lines().enumerate().skip(5) {
        let ctx = || format!("certificate line {}", n + 1);
        if ended {
            if line.trim().is_empty() {
                continue;
            }
            bail!("{}: content after `end`", ctx());
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["atom", point, part, weight] if alpha.is_none() => {
                let point: usize = point.parse().with_context(ctx)?;
                let weight = S::parse_text(weight).ok_or_else(|| anyhow!("{}: bad weight {weight:?}", ctx()))?;
                match *part {
                    "-" => mu_minus.push(Atom { point, weight }),
                    "+" => mu_plus.push(Atom { point, weight }),
                    other => bail!("{}: atom part must be - or +, found {other:?}", ctx()),
                }
            }
            ["alpha", value] if alpha.is_none() => {
                alpha = Some(S::parse_text(value).ok_or_else(|| anyhow!("{}: bad alpha {value:?}", ctx()))?);
            }
            ["recheck", value] if alpha.is_some() && recheck.is_none() => {
                recheck = Some(value.parse::<usize>().with_context(ctx)?);
            }
            ["end"] if recheck.is_some() => ended = true,
            _ => bail!("{}: unexpected {line:?}", ctx()),
        }
    }
    if !ended {
        bail!("certificate is truncated (no `end` line)");
    }
    let alpha = alpha.expect("alpha precedes end");
    if alpha.sign() != std::cmp::Ordering::Greater {
        bail!("alpha must be positive");
    }
    let z_value = S::one() / &alpha;
    let cert = DualCertificate {
        alpha,
        z_value,
        mu_minus,
        mu_plus,
        tau_spectrum: Vec::new(),
        tail_bound: None,
        recheck_factor: recheck.expect("recheck precedes end"),
        valid: false,
        reasons: Vec::new(),
    };
    Ok((header, cert))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DualCertificate<ExactReal> {
        DualCertificate {
            alpha: ExactReal::from_ratio(1, 3),
            z_value: ExactReal::from_i64(3),
            mu_minus: vec![Atom { point: 3, weight: ExactReal::from_ratio(-1, 2) }, Atom {
                point: 2,
                weight: ExactReal::from_ratio(-3, 2),
            }],
            mu_plus: vec![],
            tau_spectrum: vec![],
            tail_bound: None,
            recheck_factor: 4,
            valid: true,
            reasons: vec![],
        }
    }

    fn hashes() -> InstanceHashes {
        InstanceHashes { structure: "a".into(), region: "b".into(), sigma: "c".into() }
    }

    #[test]
    fn round_trip_sorts_atoms() {
        let text = write_certificate(&hashes(), &sample());
        assert!(text.contains("atom 2 - -3/2\natom 3 - -1/2\n"));
        let (header, cert) = parse_certificate::<ExactReal>(&text).unwrap();
        assert_eq!(header.hashes, hashes());
        assert_eq!(cert.alpha, ExactReal::from_ratio(1, 3));
        assert_eq!(write_certificate(&hashes(), &cert), text);
    }

    #[test]
    fn truncation_is_detected() {
        let text = write_certificate(&hashes(), &sample());
        let cut = &text[..text.len() - 4];
        assert!(parse_certificate::<ExactReal>(cut).is_err());
        assert!(parse_certificate::<ExactReal>(&text[..40]).is_err());
        assert!(parse_certificate::<f64>(&text).is_err());
    }
}
