use super::AnalysisError;

/// Points closer than this to a degenerate coordinate line count as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// A smooth orthogonal coordinate system `F: ℝ^m → ℝ^N` in closed form,
/// with its Lamé data.
///
/// `beta(i, j, ξ)` is `β_ij = ∂_i h_j / h_i` and `gamma(i, j, ξ)` is
/// `Γ_ij = (∂_iβ_ij − ∂_jβ_ji)/2`.
pub trait Oracle: Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    /// Fails with `SingularPoint` where some `h_i` vanishes.
    fn check(&self, xi: &[f64]) -> Result<(), AnalysisError>;
    fn point(&self, xi: &[f64]) -> Vec<f64>;
    /// `∂_i F`.
    fn partial(&self, i: usize, xi: &[f64]) -> Vec<f64>;
    /// `∂_i² F`.
    fn second(&self, i: usize, xi: &[f64]) -> Vec<f64>;
    fn h(&self, i: usize, xi: &[f64]) -> f64;
    fn beta(&self, i: usize, j: usize, xi: &[f64]) -> f64;
    fn gamma(&self, i: usize, j: usize, xi: &[f64]) -> f64;
}

/// The identity map of ℝ^m into ℝ^N.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatOracle {
    pub m: usize,
    pub n: usize,
}

impl Oracle for FlatOracle {
    fn name(&self) -> String {
        "flat".into()
    }
    fn dim(&self) -> usize {
        self.m
    }
    fn ambient_dim(&self) -> usize {
        self.n
    }
    fn check(&self, _: &[f64]) -> Result<(), AnalysisError> {
        Ok(())
    }
    fn point(&self, xi: &[f64]) -> Vec<f64> {
        let mut p = xi.to_vec();
        p.resize(self.n, 0.0);
        p
    }
    fn partial(&self, i: usize, _: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n];
        p[i] = 1.0;
        p
    }
    fn second(&self, _: usize, _: &[f64]) -> Vec<f64> {
        vec![0.0; self.n]
    }
    fn h(&self, _: usize, _: &[f64]) -> f64 {
        1.0
    }
    fn beta(&self, _: usize, _: usize, _: &[f64]) -> f64 {
        0.0
    }
    fn gamma(&self, _: usize, _: usize, _: &[f64]) -> f64 {
        0.0
    }
}

/// Closed-form values of the planar elliptic coordinate system at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticValues {
    pub f: [f64; 2],
    pub h: f64,
    pub beta12: f64,
    pub beta21: f64,
    pub gamma: f64,
}

/// Planar elliptic coordinates
/// `F(ξ_1, ξ_2) = (cosh ξ_1 cos ξ_2, sinh ξ_1 sin ξ_2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EllipticOracle;

impl EllipticOracle {
    /// `F`, `h = (sinh²ξ_1 + sin²ξ_2)^{1/2}`, `β_12 = sinh 2ξ_1/(2h²)`,
    /// `β_21 = sin 2ξ_2/(2h²)` and `γ = ∂_1β_12 = (1 − cosh 2ξ_1 cos 2ξ_2)/(2h⁴)`.
    ///
    /// ```
    /// use lamenet::analysis::EllipticOracle;
    /// let v = EllipticOracle.evaluate(0.0, std::f64::consts::FRAC_PI_2).unwrap();
    /// assert!(v.f[0].abs() < 1e-16 && v.f[1] == 0.0);
    /// assert_eq!((v.h, v.beta12), (1.0, 0.0));
    /// assert!(v.beta21.abs() < 1e-16 && (v.gamma - 1.0).abs() < 1e-15);
    /// assert!(EllipticOracle.evaluate(0.0, 0.0).is_err());
    /// ```
    pub fn evaluate(&self, x1: f64, x2: f64) -> Result<EllipticValues, AnalysisError> {
        let h2 = x1.sinh().powi(2) + x2.sin().powi(2);
        let h = h2.sqrt();
        if !(h > SINGULAR_TOL) {
            return Err(AnalysisError::SingularPoint { xi: vec![x1, x2] });
        }
        Ok(EllipticValues {
            f: [x1.cosh() * x2.cos(), x1.sinh() * x2.sin()],
            h,
            beta12: (2.0 * x1).sinh() / (2.0 * h2),
            beta21: (2.0 * x2).sin() / (2.0 * h2),
            gamma: (1.0 - (2.0 * x1).cosh() * (2.0 * x2).cos()) / (2.0 * h2 * h2),
        })
    }
}

impl Oracle for EllipticOracle {
    fn name(&self) -> String {
        "elliptic".into()
    }
    fn dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        2
    }
    fn check(&self, xi: &[f64]) -> Result<(), AnalysisError> {
        self.evaluate(xi[0], xi[1]).map(|_| ())
    }
    fn point(&self, xi: &[f64]) -> Vec<f64> {
        vec![xi[0].cosh() * xi[1].cos(), xi[0].sinh() * xi[1].sin()]
    }
    fn partial(&self, i: usize, xi: &[f64]) -> Vec<f64> {
        let (c1, s1, c2, s2) = (xi[0].cosh(), xi[0].sinh(), xi[1].cos(), xi[1].sin());
        match i {
            0 => vec![s1 * c2, c1 * s2],
            _ => vec![-c1 * s2, s1 * c2],
        }
    }
    fn second(&self, i: usize, xi: &[f64]) -> Vec<f64> {
        let (c1, s1, c2, s2) = (xi[0].cosh(), xi[0].sinh(), xi[1].cos(), xi[1].sin());
        match i {
            0 => vec![c1 * c2, s1 * s2],
            _ => vec![-c1 * c2, -s1 * s2],
        }
    }
    fn h(&self, _: usize, xi: &[f64]) -> f64 {
        (xi[0].sinh().powi(2) + xi[1].sin().powi(2)).sqrt()
    }
    fn beta(&self, i: usize, _: usize, xi: &[f64]) -> f64 {
        let h2 = xi[0].sinh().powi(2) + xi[1].sin().powi(2);
        match i {
            0 => (2.0 * xi[0]).sinh() / (2.0 * h2),
            _ => (2.0 * xi[1]).sin() / (2.0 * h2),
        }
    }
    fn gamma(&self, i: usize, _: usize, xi: &[f64]) -> f64 {
        let h2 = xi[0].sinh().powi(2) + xi[1].sin().powi(2);
        let g = (1.0 - (2.0 * xi[0]).cosh() * (2.0 * xi[1]).cos()) / (2.0 * h2 * h2);
        if i == 0 {
            g
        } else {
            -g
        }
    }
}

/// Spherical coordinates `(r, θ, φ) ↦ r(sin θ cos φ, sin θ sin φ, cos θ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SphericalOracle;

impl Oracle for SphericalOracle {
    fn name(&self) -> String {
        "spherical".into()
    }
    fn dim(&self) -> usize {
        3
    }
    fn ambient_dim(&self) -> usize {
        3
    }
    fn check(&self, xi: &[f64]) -> Result<(), AnalysisError> {
        if xi[0] > SINGULAR_TOL && xi[1].sin().abs() > SINGULAR_TOL {
            Ok(())
        } else {
            Err(AnalysisError::SingularPoint { xi: xi.to_vec() })
        }
    }
    fn point(&self, xi: &[f64]) -> Vec<f64> {
        let (r, t, p) = (xi[0], xi[1], xi[2]);
        vec![r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()]
    }
    fn partial(&self, i: usize, xi: &[f64]) -> Vec<f64> {
        let (r, t, p) = (xi[0], xi[1], xi[2]);
        match i {
            0 => vec![t.sin() * p.cos(), t.sin() * p.sin(), t.cos()],
            1 => vec![r * t.cos() * p.cos(), r * t.cos() * p.sin(), -r * t.sin()],
            _ => vec![-r * t.sin() * p.sin(), r * t.sin() * p.cos(), 0.0],
        }
    }
    fn second(&self, i: usize, xi: &[f64]) -> Vec<f64> {
        let (r, t, p) = (xi[0], xi[1], xi[2]);
        match i {
            0 => vec![0.0; 3],
            1 => vec![-r * t.sin() * p.cos(), -r * t.sin() * p.sin(), -r * t.cos()],
            _ => vec![-r * t.sin() * p.cos(), -r * t.sin() * p.sin(), 0.0],
        }
    }
    fn h(&self, i: usize, xi: &[f64]) -> f64 {
        match i {
            0 => 1.0,
            1 => xi[0],
            _ => xi[0] * xi[1].sin(),
        }
    }
    fn beta(&self, i: usize, j: usize, xi: &[f64]) -> f64 {
        match (i, j) {
            (0, 1) => 1.0,
            (0, 2) => xi[1].sin(),
            (1, 2) => xi[1].cos(),
            _ => 0.0,
        }
    }
    fn gamma(&self, i: usize, j: usize, xi: &[f64]) -> f64 {
        match (i, j) {
            (1, 2) => -xi[1].sin() / 2.0,
            (2, 1) => xi[1].sin() / 2.0,
            _ => 0.0,
        }
    }
}

/// A circle of radius `R` traversed at unit speed, starting at the origin
/// along `e_1` and turning towards `e_2`; a one-coordinate oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleOracle {
    pub radius: f64,
}

impl Oracle for CircleOracle {
    fn name(&self) -> String {
        format!("circle:{}", self.radius)
    }
    fn dim(&self) -> usize {
        1
    }
    fn ambient_dim(&self) -> usize {
        2
    }
    fn check(&self, xi: &[f64]) -> Result<(), AnalysisError> {
        if self.radius > SINGULAR_TOL {
            Ok(())
        } else {
            Err(AnalysisError::SingularPoint { xi: xi.to_vec() })
        }
    }
    fn point(&self, xi: &[f64]) -> Vec<f64> {
        let (r, s) = (self.radius, xi[0] / self.radius);
        vec![r * s.sin(), r - r * s.cos()]
    }
    fn partial(&self, _: usize, xi: &[f64]) -> Vec<f64> {
        let s = xi[0] / self.radius;
        vec![s.cos(), s.sin()]
    }
    fn second(&self, _: usize, xi: &[f64]) -> Vec<f64> {
        let s = xi[0] / self.radius;
        vec![-s.sin() / self.radius, s.cos() / self.radius]
    }
    fn h(&self, _: usize, _: &[f64]) -> f64 {
        1.0
    }
    fn beta(&self, _: usize, _: usize, _: &[f64]) -> f64 {
        0.0
    }
    fn gamma(&self, _: usize, _: usize, _: &[f64]) -> f64 {
        0.0
    }
}

/// Looks up a builtin oracle by name: `flat`, `elliptic`, `spherical` or
/// `circle:<R>`.
pub fn builtin_oracle(spec: &str) -> Result<Box<dyn Oracle>, AnalysisError> {
    let unknown = || AnalysisError::UnknownOracle(spec.to_string());
    match spec.split_once(':') {
        None => match spec {
            "flat" => Ok(Box::new(FlatOracle { m: 2, n: 2 })),
            "flat3" => Ok(Box::new(FlatOracle { m: 3, n: 3 })),
            "elliptic" => Ok(Box::new(EllipticOracle)),
            "spherical" => Ok(Box::new(SphericalOracle)),
            _ => Err(unknown()),
        },
        Some(("circle", r)) => {
            let radius: f64 = r.trim().parse().map_err(|_| unknown())?;
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(unknown());
            }
            Ok(Box::new(CircleOracle { radius }))
        }
        Some(_) => Err(unknown()),
    }
}
