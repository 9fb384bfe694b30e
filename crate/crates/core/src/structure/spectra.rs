use serde::Serialize;

use super::StructureError;
use crate::drazin::{check_right_drazin, drazin_inverse, DrazinOptions};
use crate::linalg::{ordered_schur, require_square, CMatrix, Complex64};

/// Computed eigenvalues grouped by single linkage within `radius`, returned
/// as cluster means. A defective eigenvalue of order `k` scatters by about
/// `ε^{1/k}` under roundoff, but the mean of its cluster stays accurate.
pub fn eigenvalue_centroids(a: &CMatrix, radius: f64) -> Result<Vec<Complex64>, StructureError> {
    let n = require_square(a)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let eig = ordered_schur(a, 0)?.eigenvalues();
    let mut label: Vec<usize> = (0..eig.len()).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..eig.len() {
        for j in i + 1..eig.len() {
            if (eig[i] - eig[j]).norm() <= radius {
                let (ri, rj) = (root(&mut label, i), root(&mut label, j));
                label[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut clusters: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..eig.len() {
        let r = root(&mut label, i);
        match clusters.iter_mut().find(|c| c.0 == r) {
            Some(c) => {
                c.1 += eig[i];
                c.2 += 1;
            }
            None => clusters.push((r, eig[i], 1)),
        }
    }
    Ok(clusters.into_iter().map(|(_, sum, count)| sum / count as f64).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectraEntry {
    pub lambda: [f64; 2],
    pub from_spectrum: bool,
    pub index: Option<usize>,
    /// Worst relative axiom residual of the Drazin inverse of `λI − A`.
    pub residual: f64,
    /// Worst relative residual of `X*` as a right inverse of `λ̄I − A*`.
    pub adjoint_residual: f64,
    pub error: Option<String>,
    pub passes: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectraReport {
    pub tol: f64,
    pub entries: Vec<SpectraEntry>,
}

impl SpectraReport {
    pub fn passes(&self) -> bool {
        self.entries.iter().all(|e| e.passes)
    }

    pub fn worst_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.residual.max(e.adjoint_residual))
            .fold(0.0, f64::max)
    }
}

fn scan_one(a: &CMatrix, lambda: Complex64, from_spectrum: bool, opts: &DrazinOptions) -> SpectraEntry {
    let shifted = a.shifted_negation(lambda);
    let mut entry = SpectraEntry {
        lambda: [lambda.re, lambda.im],
        from_spectrum,
        index: None,
        residual: f64::INFINITY,
        adjoint_residual: f64::INFINITY,
        error: None,
        passes: false,
    };
    let d = match drazin_inverse(&shifted, opts) {
        Ok(d) => d,
        Err(e) => {
            entry.error = Some(e.to_string());
            return entry;
        }
    };
    entry.index = Some(d.index);
    entry.residual = d.residuals.max_relative();
    match check_right_drazin(&shifted.adjoint(), &d.inverse.adjoint(), d.index) {
        Ok(r) => entry.adjoint_residual = r.max_relative(),
        Err(e) => entry.error = Some(e.to_string()),
    }
    entry.passes = entry.error.is_none() && entry.residual <= opts.residual_tol && entry.adjoint_residual <= opts.residual_tol;
    entry
}

/// Drazin inverse of `λI − A` at every eigenvalue centroid of `A` and at
/// each extra sample, with the conjugate identity on `λ̄I − A*`.
pub fn spectra_scan(a: &CMatrix, samples: &[Complex64], opts: &DrazinOptions) -> Result<SpectraReport, StructureError> {
    require_square(a)?;
    let radius = 1e-3 * a.norm().max(1.0);
    let mut entries: Vec<SpectraEntry> = eigenvalue_centroids(a, radius)?
        .into_iter()
        .map(|l| scan_one(a, l, true, opts))
        .collect();
    entries.extend(samples.iter().map(|&l| scan_one(a, l, false, opts)));
    Ok(SpectraReport {
        tol: opts.residual_tol,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn centroids_merge_a_jordan_block() {
        let a = CMatrix::jordan_zero(4).direct_sum(&CMatrix::from_real_diagonal(&[2.0, -1.0]));
        let mut cs = eigenvalue_centroids(&a, 1e-2).unwrap();
        cs.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert_eq!(cs.len(), 3);
        for (got, want) in cs.iter().zip([-1.0, 0.0, 2.0]) {
            assert!((got - c(want)).norm() < 1e-12, "{got}");
        }
    }

    #[test]
    fn scan_hits_every_eigenvalue() {
        let a = CMatrix::jordan_zero(2).direct_sum(&CMatrix::from_real_diagonal(&[3.0]));
        let report = spectra_scan(&a, &[c(0.5), Complex64::new(1.0, 1.0)], &DrazinOptions::default()).unwrap();
        assert!(report.passes(), "{report:#?}");
        let at = |l: f64| report.entries.iter().find(|e| (e.lambda[0] - l).abs() < 1e-9 && e.from_spectrum).unwrap();
        assert_eq!(at(0.0).index, Some(2));
        assert_eq!(at(3.0).index, Some(1));
        assert!(report.entries.iter().filter(|e| !e.from_spectrum).all(|e| e.index == Some(0)));
    }
}
