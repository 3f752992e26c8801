//! Uniform axis-aligned quadrilateral meshes of a rectangle.
//!
//! Elements are numbered row by row (`id = j * nx + i`). Local faces are
//! numbered bottom, right, top, left. Every face is parametrized along the
//! increasing coordinate so that quadrature points on an interior face match
//! physically from both sides.

use crate::error::{input, Result};
use crate::quadrature::gauss_legendre;

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Local face indices within an element.
pub const BOTTOM: usize = 0;
pub const RIGHT: usize = 1;
pub const TOP: usize = 2;
pub const LEFT: usize = 3;

/// Outward unit normals of the local faces.
pub const LOCAL_NORMALS: [[f64; 2]; 4] = [[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]];

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: usize,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

impl Element {
    pub fn hx(&self) -> f64 {
        self.upper[0] - self.lower[0]
    }

    pub fn hy(&self) -> f64 {
        self.upper[1] - self.lower[1]
    }

    pub fn diameter(&self) -> f64 {
        self.hx().hypot(self.hy())
    }

    pub fn area(&self) -> f64 {
        self.hx() * self.hy()
    }

    /// Map reference coordinates in `[-1, 1]^2` to the element.
    pub fn map(&self, xi: f64, eta: f64) -> [f64; 2] {
        [
            self.lower[0] + 0.5 * (xi + 1.0) * self.hx(),
            self.lower[1] + 0.5 * (eta + 1.0) * self.hy(),
        ]
    }

    pub fn inverse_map(&self, x: [f64; 2]) -> [f64; 2] {
        [
            2.0 * (x[0] - self.lower[0]) / self.hx() - 1.0,
            2.0 * (x[1] - self.lower[1]) / self.hy() - 1.0,
        ]
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        let tol = 1e-12 * self.diameter();
        x[0] >= self.lower[0] - tol
            && x[0] <= self.upper[0] + tol
            && x[1] >= self.lower[1] - tol
            && x[1] <= self.upper[1] + tol
    }

    pub fn jacobian_det(&self) -> f64 {
        0.25 * self.hx() * self.hy()
    }
}

/// An element and the local index of one of its faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceSide {
    pub element: usize,
    pub local_face: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub measure: f64,
    /// Outward normal of the plus element (of the domain on the boundary).
    pub normal: [f64; 2],
    pub plus: FaceSide,
    pub minus: Option<FaceSide>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub elements: Vec<Element>,
    pub interior_faces: Vec<Face>,
    pub boundary_faces: Vec<Face>,
    /// Largest element diameter.
    pub h: f64,
}

impl Mesh {
    /// Uniform `nx x ny` tensor-product mesh of `rect`.
    pub fn build(rect: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return input(format!("element counts must be positive, got {nx} x {ny}"));
        }
        let (w, hgt) = (rect.width(), rect.height());
        if !(w.is_finite() && hgt.is_finite()) || w <= 0.0 || hgt <= 0.0 {
            return input(format!("degenerate rectangle {rect:?}"));
        }
        let hx = w / nx as f64;
        let hy = hgt / ny as f64;
        let xs = |i: usize| if i == nx { rect.x1 } else { rect.x0 + i as f64 * hx };
        let ys = |j: usize| if j == ny { rect.y1 } else { rect.y0 + j as f64 * hy };

        let mut elements = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                elements.push(Element {
                    id: j * nx + i,
                    lower: [xs(i), ys(j)],
                    upper: [xs(i + 1), ys(j + 1)],
                });
            }
        }

        let side = |i: usize, j: usize, f: usize| FaceSide { element: j * nx + i, local_face: f };
        let mut interior_faces = Vec::new();
        let mut boundary_faces = Vec::new();
        // vertical faces x = xs(i)
        for j in 0..ny {
            for i in 0..=nx {
                let start = [xs(i), ys(j)];
                let end = [xs(i), ys(j + 1)];
                let measure = end[1] - start[1];
                if i == 0 {
                    boundary_faces.push(Face { start, end, measure, normal: [-1.0, 0.0], plus: side(0, j, LEFT), minus: None });
                } else if i == nx {
                    boundary_faces.push(Face { start, end, measure, normal: [1.0, 0.0], plus: side(nx - 1, j, RIGHT), minus: None });
                } else {
                    interior_faces.push(Face {
                        start,
                        end,
                        measure,
                        normal: [1.0, 0.0],
                        plus: side(i - 1, j, RIGHT),
                        minus: Some(side(i, j, LEFT)),
                    });
                }
            }
        }
        // horizontal faces y = ys(j)
        for j in 0..=ny {
            for i in 0..nx {
                let start = [xs(i), ys(j)];
                let end = [xs(i + 1), ys(j)];
                let measure = end[0] - start[0];
                if j == 0 {
                    boundary_faces.push(Face { start, end, measure, normal: [0.0, -1.0], plus: side(i, 0, BOTTOM), minus: None });
                } else if j == ny {
                    boundary_faces.push(Face { start, end, measure, normal: [0.0, 1.0], plus: side(i, ny - 1, TOP), minus: None });
                } else {
                    interior_faces.push(Face {
                        start,
                        end,
                        measure,
                        normal: [0.0, 1.0],
                        plus: side(i, j - 1, TOP),
                        minus: Some(side(i, j, BOTTOM)),
                    });
                }
            }
        }

        let h = elements.iter().map(Element::diameter).fold(0.0, f64::max);
        Ok(Self { rect, nx, ny, elements, interior_faces, boundary_faces, h })
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// All faces, interior first.
    pub fn faces(&self) -> impl Iterator<Item = &Face> {
        self.interior_faces.iter().chain(self.boundary_faces.iter())
    }

    /// Element containing `x` (the lowest id on shared boundaries).
    pub fn locate(&self, x: [f64; 2]) -> Option<usize> {
        self.elements.iter().position(|e| e.contains(x))
    }
}

/// Gauss–Legendre points mapped onto a face, weights scaled by its length.
pub fn face_quadrature(face: &Face, order: usize) -> Result<Vec<([f64; 2], f64)>> {
    if order == 0 {
        return input("face quadrature order must be at least 1");
    }
    let (s, w) = gauss_legendre(order);
    Ok(s.iter()
        .zip(&w)
        .map(|(&s, &w)| {
            let t = 0.5 * (s + 1.0);
            let p = [
                face.start[0] + t * (face.end[0] - face.start[0]),
                face.start[1] + t * (face.end[1] - face.start[1]),
            ];
            (p, 0.5 * w * face.measure)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let m = Mesh::build(Rect::unit(), 1, 1).unwrap();
        assert_eq!(m.n_elements(), 1);
        assert!(m.interior_faces.is_empty());
        assert_eq!(m.boundary_faces.len(), 4);
        assert!((m.h - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn two_cells_share_one_face() {
        let m = Mesh::build(Rect::unit(), 2, 1).unwrap();
        assert_eq!(m.n_elements(), 2);
        assert_eq!(m.interior_faces.len(), 1);
        assert_eq!(m.boundary_faces.len(), 6);
        let f = &m.interior_faces[0];
        assert_eq!(f.normal, [1.0, 0.0]);
        assert_eq!(f.plus.element, 0);
        assert_eq!(f.minus.unwrap().element, 1);
    }

    #[test]
    fn face_counts_match_tensor_formulas() {
        for (nx, ny) in [(4, 4), (3, 5), (1, 7), (8, 2)] {
            let m = Mesh::build(Rect::new(-1.0, 2.0, 0.5, 1.5), nx, ny).unwrap();
            assert_eq!(m.interior_faces.len(), 2 * nx * ny - nx - ny);
            assert_eq!(m.boundary_faces.len(), 2 * (nx + ny));
        }
        let m = Mesh::build(Rect::unit(), 4, 4).unwrap();
        assert_eq!((m.n_elements(), m.interior_faces.len(), m.boundary_faces.len()), (16, 24, 16));
    }

    #[test]
    fn each_face_owned_consistently() {
        let m = Mesh::build(Rect::unit(), 3, 2).unwrap();
        let mut count = vec![0usize; m.n_elements()];
        for f in m.faces() {
            count[f.plus.element] += 1;
            if let Some(mi) = f.minus {
                count[mi.element] += 1;
                assert!(f.plus.element < mi.element);
                let n_minus = LOCAL_NORMALS[mi.local_face];
                assert_eq!([-n_minus[0], -n_minus[1]], f.normal);
            }
            assert_eq!(LOCAL_NORMALS[f.plus.local_face], f.normal);
            assert!(f.measure > 0.0);
            assert!(((f.normal[0].powi(2) + f.normal[1].powi(2)) - 1.0).abs() < 1e-15);
        }
        assert!(count.iter().all(|&c| c == 4));
    }

    #[test]
    fn closed_surface_identity_per_element() {
        let m = Mesh::build(Rect::new(0.0, 2.0, 0.0, 3.0), 3, 4).unwrap();
        let mut sums = vec![[0.0f64; 2]; m.n_elements()];
        for f in m.faces() {
            for d in 0..2 {
                sums[f.plus.element][d] += f.measure * f.normal[d];
                if let Some(mi) = f.minus {
                    sums[mi.element][d] -= f.measure * f.normal[d];
                }
            }
        }
        for s in sums {
            assert!(s[0].abs() < 1e-14 && s[1].abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(Mesh::build(Rect::unit(), 0, 3).is_err());
        assert!(Mesh::build(Rect::new(0.0, 0.0, 0.0, 1.0), 1, 1).is_err());
        assert!(Mesh::build(Rect::new(1.0, 0.0, 0.0, 1.0), 1, 1).is_err());
    }

    #[test]
    fn deterministic_construction() {
        let a = Mesh::build(Rect::unit(), 5, 3).unwrap();
        let b = Mesh::build(Rect::unit(), 5, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn face_quadrature_rules() {
        let face = Face {
            start: [0.0, 0.0],
            end: [0.0, 1.0],
            measure: 1.0,
            normal: [-1.0, 0.0],
            plus: FaceSide { element: 0, local_face: LEFT },
            minus: None,
        };
        let q1 = face_quadrature(&face, 1).unwrap();
        assert_eq!(q1.len(), 1);
        assert!((q1[0].0[1] - 0.5).abs() < 1e-15 && (q1[0].1 - 1.0).abs() < 1e-15);
        // second moment about the midpoint
        let q2 = face_quadrature(&face, 2).unwrap();
        let m2: f64 = q2.iter().map(|(p, w)| w * (p[1] - 0.5).powi(2)).sum();
        assert!((m2 - 1.0 / 12.0).abs() < 1e-15);
        assert!(face_quadrature(&face, 0).is_err());
    }
}
