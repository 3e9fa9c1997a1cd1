use std::fmt;

/// A polynomial in the three barycentric coordinates of a triangle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BaryPoly {
    pub terms: Vec<(f64, [u32; 3])>,
}

impl BaryPoly {
    pub fn monomial(coefficient: f64, exponents: [u32; 3]) -> Self {
        Self {
            terms: vec![(coefficient, exponents)],
        }
    }

    pub fn from_terms(terms: &[(f64, [u32; 3])]) -> Self {
        Self {
            terms: terms.to_vec(),
        }
    }

    /// `lambda_i`
    pub fn lambda(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Self::monomial(1.0, e)
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, e)| (c * s, e)).collect(),
        }
    }

    pub fn mul(&self, other: &BaryPoly) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(c1, e1) in &self.terms {
            for &(c2, e2) in &other.terms {
                terms.push((c1 * c2, [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]]));
            }
        }
        Self { terms }.simplified()
    }

    pub fn add(&self, other: &BaryPoly) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }.simplified()
    }

    /// Merges equal exponents and drops zero coefficients.
    pub fn simplified(mut self) -> Self {
        self.terms.sort_by_key(|&(_, e)| e);
        let mut out: Vec<(f64, [u32; 3])> = Vec::with_capacity(self.terms.len());
        for (c, e) in self.terms {
            match out.last_mut() {
                Some(last) if last.1 == e => last.0 += c,
                _ => out.push((c, e)),
            }
        }
        out.retain(|&(c, _)| c != 0.0);
        Self { terms: out }
    }

    pub fn eval(&self, l: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|&(c, e)| c * pow(l[0], e[0]) * pow(l[1], e[1]) * pow(l[2], e[2]))
            .sum()
    }

    /// Partial derivatives with respect to `lambda_0, lambda_1, lambda_2`,
    /// treating them as independent variables.
    pub fn bary_gradient(&self, l: [f64; 3]) -> [f64; 3] {
        let mut g = [0.0; 3];
        for &(c, e) in &self.terms {
            for (i, gi) in g.iter_mut().enumerate() {
                if e[i] == 0 {
                    continue;
                }
                let mut term = c * e[i] as f64;
                for j in 0..3 {
                    let k = if i == j { e[j] - 1 } else { e[j] };
                    term *= pow(l[j], k);
                }
                *gi += term;
            }
        }
        g
    }
}

#[inline]
fn pow(x: f64, k: u32) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        2 => x * x,
        _ => x.powi(k as i32),
    }
}

impl fmt::Display for BaryPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, &(c, e)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "·l{i}")?,
                    _ => write!(f, "·l{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}
