//! Lagrange `P_k` basis on the reference triangle, stored as monomial
//! coefficients so derivatives of any order are exact polynomial operations.

use nalgebra::{DMatrix, Matrix2, Vector2};

/// Partial derivatives `(a, b)` meaning `d^a/dx^a d^b/dy^b`, up to order three.
const MULTI_INDICES: [(u32, u32); 10] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];

#[derive(Clone, Debug)]
pub struct ReferenceElement {
    degree: usize,
    monomials: Vec<(u32, u32)>,
    nodes: Vec<[f64; 2]>,
    /// `derivs[m][i][j]`: coefficient of monomial `j` in derivative `MULTI_INDICES[m]` of basis `i`.
    derivs: Vec<Vec<Vec<f64>>>,
}

impl ReferenceElement {
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 1);
        let k = degree as u32;
        let monomials: Vec<(u32, u32)> = (0..=k).flat_map(|total| (0..=total).map(move |b| (total - b, b))).collect();
        let nodes = lagrange_nodes(degree);
        let n = nodes.len();
        assert_eq!(n, monomials.len());

        let vandermonde = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = monomials[j];
            nodes[i][0].powi(a as i32) * nodes[i][1].powi(b as i32)
        });
        let inverse = vandermonde.try_inverse().expect("Lagrange nodes are unisolvent");
        // basis i has monomial coefficients in column i of V^-1
        let base: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| inverse[(j, i)]).collect()).collect();

        let derivs = MULTI_INDICES
            .iter()
            .map(|&(da, db)| {
                base.iter()
                    .map(|coeffs| {
                        let mut out = vec![0.0; n];
                        for (j, &(a, b)) in monomials.iter().enumerate() {
                            if a < da || b < db {
                                continue;
                            }
                            let factor = falling(a, da) * falling(b, db);
                            let target = monomials.iter().position(|&m| m == (a - da, b - db)).unwrap();
                            out[target] += factor * coeffs[j];
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        Self { degree, monomials, nodes, derivs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_basis(&self) -> usize {
        self.nodes.len()
    }

    /// Node positions in local order: vertices, then `k - 1` nodes per local
    /// edge `(0,1), (1,2), (2,0)` running from the first vertex, then interior nodes.
    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn num_interior(&self) -> usize {
        let k = self.degree;
        if k < 3 {
            0
        } else {
            (k - 1) * (k - 2) / 2
        }
    }

    /// All reference derivatives up to order three at `xi`, indexed like `MULTI_INDICES`.
    pub fn eval(&self, xi: [f64; 2]) -> [Vec<f64>; 10] {
        let powers: Vec<f64> = self.monomials.iter().map(|&(a, b)| xi[0].powi(a as i32) * xi[1].powi(b as i32)).collect();
        std::array::from_fn(|m| {
            self.derivs[m]
                .iter()
                .map(|coeffs| coeffs.iter().zip(&powers).map(|(c, p)| c * p).sum())
                .collect()
        })
    }

    /// Basis values and physical derivatives for an affine element with inverse Jacobian `inv_jac`.
    pub fn eval_physical(&self, xi: [f64; 2], inv_jac: &Matrix2<f64>) -> BasisValues {
        let d = self.eval(xi);
        let g = inv_jac;
        let gt = g.transpose();
        let n = self.num_basis();
        let mut gradients = Vec::with_capacity(n);
        let mut hessians = Vec::with_capacity(n);
        let mut third = Vec::with_capacity(n);
        for i in 0..n {
            gradients.push(gt * Vector2::new(d[1][i], d[2][i]));
            let h_ref = Matrix2::new(d[3][i], d[4][i], d[4][i], d[5][i]);
            hessians.push(gt * h_ref * g);
            third.push([d[6][i], d[7][i], d[8][i], d[9][i]]);
        }
        BasisValues { values: d[0].clone(), gradients, hessians, third_ref: third, inv_jac: *inv_jac }
    }
}

/// Local basis functions evaluated at one point of a physical element.
#[derive(Clone, Debug)]
pub struct BasisValues {
    pub values: Vec<f64>,
    pub gradients: Vec<Vector2<f64>>,
    pub hessians: Vec<Matrix2<f64>>,
    third_ref: Vec<[f64; 4]>,
    inv_jac: Matrix2<f64>,
}

impl BasisValues {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Third directional derivative `D^3 phi_i [d1, d2, d3]`.
    pub fn third_derivative(&self, i: usize, dirs: [Vector2<f64>; 3]) -> f64 {
        let r = dirs.map(|d| self.inv_jac * d);
        let t = &self.third_ref[i];
        let mut sum = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    sum += t[a + b + c] * r[0][a] * r[1][b] * r[2][c];
                }
            }
        }
        sum
    }

    /// Directional derivative `d^j/dn^j phi_i` for `j` in `0..=3`.
    pub fn normal_derivative(&self, i: usize, j: usize, n: &Vector2<f64>) -> f64 {
        match j {
            0 => self.values[i],
            1 => self.gradients[i].dot(n),
            2 => n.dot(&(self.hessians[i] * n)),
            3 => self.third_derivative(i, [*n, *n, *n]),
            _ => panic!("derivatives above order three are not tabulated"),
        }
    }
}

fn falling(a: u32, d: u32) -> f64 {
    (0..d).map(|i| f64::from(a - i)).product()
}

fn lagrange_nodes(k: usize) -> Vec<[f64; 2]> {
    let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let mut nodes = corners.to_vec();
    let kf = k as f64;
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let (a, b) = (corners[i], corners[j]);
        for m in 1..k {
            let s = m as f64 / kf;
            nodes.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        }
    }
    for j in 1..k {
        for i in 1..k - j {
            nodes.push([i as f64 / kf, j as f64 / kf]);
        }
    }
    nodes
}
