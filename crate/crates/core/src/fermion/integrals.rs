use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial-orbital molecular integrals.
///
/// `two(p, q, r, s)` is the coefficient of `a†_p a†_q a_r a_s` (before the 1/2
/// prefactor), i.e. ∫ φp*(1) φq*(2) φr(2) φs(1) / r12, which is the chemist
/// integral (ps|qr). With this layout `two(0,1,1,0)` is a Coulomb integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MolecularIntegrals {
    pub h_nuc: f64,
    pub n_spatial: usize,
    pub n_electrons: Option<usize>,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
}

impl MolecularIntegrals {
    pub fn zeros(n_spatial: usize, h_nuc: f64) -> Self {
        Self {
            h_nuc,
            n_spatial,
            n_electrons: None,
            one_body: vec![0.0; n_spatial.pow(2)],
            two_body: vec![0.0; n_spatial.pow(4)],
        }
    }

    #[inline]
    fn idx2(&self, p: usize, q: usize) -> usize {
        p * self.n_spatial + q
    }

    #[inline]
    fn idx4(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n_spatial + q) * self.n_spatial + r) * self.n_spatial + s
    }

    pub fn one(&self, p: usize, q: usize) -> f64 {
        self.one_body[self.idx2(p, q)]
    }

    pub fn two(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body[self.idx4(p, q, r, s)]
    }

    /// Chemist-notation integral (pq|rs).
    pub fn chem(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two(p, r, s, q)
    }

    /// Sets h_pq and h_qp.
    pub fn set_one(&mut self, p: usize, q: usize, v: f64) {
        let (a, b) = (self.idx2(p, q), self.idx2(q, p));
        self.one_body[a] = v;
        self.one_body[b] = v;
    }

    /// Sets (pq|rs) together with its 8-fold real-orbital images.
    pub fn set_chem(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            let i = self.idx4(a, c, d, b);
            self.two_body[i] = v;
        }
    }

    /// Spin-orbital one-body element with interleaved (α, β) ordering.
    pub fn spin_one(&self, p: usize, q: usize) -> f64 {
        if p % 2 != q % 2 {
            return 0.0;
        }
        self.one(p / 2, q / 2)
    }

    /// Spin-orbital two-body element h_pqrs, coefficient of a†p a†q a_r a_s.
    pub fn spin_two(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        if p % 2 != s % 2 || q % 2 != r % 2 {
            return 0.0;
        }
        self.two(p / 2, q / 2, r / 2, s / 2)
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    /// Largest violation of the real-orbital symmetries.
    pub fn symmetry_error(&self) -> f64 {
        let n = self.n_spatial;
        let mut err: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                err = err.max((self.one(p, q) - self.one(q, p)).abs());
                for r in 0..n {
                    for s in 0..n {
                        let v = self.two(p, q, r, s);
                        err = err.max((v - self.two(q, p, s, r)).abs());
                        err = err.max((v - self.two(s, r, q, p)).abs());
                        err = err.max((v - self.two(r, s, p, q)).abs());
                        err = err.max((v - self.two(p, r, q, s)).abs());
                    }
                }
            }
        }
        err
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses the FCIDUMP subset: a `&FCI ... &END` (or `/`) header of KEY=value
/// pairs followed by `value i j k l` records in 1-based chemist order.
pub fn load_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let mut header: HashMap<String, String> = HashMap::new();
    let mut lines = text.lines().enumerate().peekable();
    let mut header_text = String::new();
    let mut saw_start = false;
    let mut header_end_line = 0;

    for (no, raw) in lines.by_ref() {
        let line = raw.trim();
        if !saw_start {
            if line.is_empty() {
                continue;
            }
            let upper = line.to_ascii_uppercase();
            let Some(rest) = upper.strip_prefix("&FCI") else {
                return Err(parse_err(no + 1, "expected &FCI header"));
            };
            saw_start = true;
            if let Some(pos) = rest.find("&END").or_else(|| rest.find('/')) {
                header_text.push_str(&rest[..pos]);
                header_end_line = no + 1;
                break;
            }
            header_text.push_str(rest);
            header_text.push(',');
            continue;
        }
        let upper = line.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END").or_else(|| upper.find('/')) {
            header_text.push_str(&upper[..pos]);
            header_end_line = no + 1;
            break;
        }
        header_text.push_str(&upper);
        header_text.push(',');
    }
    if header_end_line == 0 {
        return Err(parse_err(text.lines().count().max(1), "unterminated &FCI header"));
    }

    // Values may span commas (ORBSYM=1,1,); a token without '=' continues the
    // previous key.
    let mut last_key: Option<String> = None;
    for tok in header_text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((k, v)) = tok.split_once('=') {
            let key = k.trim().to_string();
            header.insert(key.clone(), v.trim().to_string());
            last_key = Some(key);
        } else if let Some(k) = &last_key {
            if let Some(v) = header.get_mut(k) {
                v.push(',');
                v.push_str(tok);
            }
        } else {
            return Err(parse_err(header_end_line, format!("malformed header token '{tok}'")));
        }
    }

    let norb: usize = header
        .get("NORB")
        .ok_or_else(|| parse_err(header_end_line, "missing NORB"))?
        .parse()
        .map_err(|_| parse_err(header_end_line, "NORB is not an integer"))?;
    if norb == 0 {
        return Err(parse_err(header_end_line, "NORB must be positive"));
    }
    let nelec = match header.get("NELEC") {
        Some(v) => Some(v.parse::<usize>().map_err(|_| parse_err(header_end_line, "NELEC is not an integer"))?),
        None => None,
    };

    let mut ints = MolecularIntegrals::zeros(norb, 0.0);
    ints.n_electrons = nelec;
    for (no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(parse_err(no + 1, format!("expected 5 fields, found {}", fields.len())));
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| parse_err(no + 1, format!("bad value '{}'", fields[0])))?;
        let mut idx = [0usize; 4];
        for (slot, f) in idx.iter_mut().zip(&fields[1..]) {
            *slot = f.parse().map_err(|_| parse_err(no + 1, format!("bad index '{f}'")))?;
            if *slot > norb {
                return Err(parse_err(no + 1, format!("index {slot} exceeds NORB={norb}")));
            }
        }
        match idx {
            [0, 0, 0, 0] => ints.h_nuc = value,
            [i, j, 0, 0] if i > 0 && j > 0 => ints.set_one(i - 1, j - 1, value),
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => ints.set_chem(i - 1, j - 1, k - 1, l - 1, value),
            // Orbital-energy records (i 0 0 0) carry no Hamiltonian data.
            [_, 0, 0, 0] => {}
            _ => return Err(parse_err(no + 1, format!("unsupported index pattern {idx:?}"))),
        }
    }
    Ok(ints)
}

pub fn load_fcidump_file(path: &Path) -> Result<MolecularIntegrals> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::MissingFixture(format!("{}: {e}", path.display())))?;
    load_fcidump(&text)
}
