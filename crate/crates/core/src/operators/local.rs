//! Radial/spherical contractions of a second-order jet at one point.

use crate::error::EvalError;
use crate::jet::{self, Jet1, Jet2, Scalar, MAX_DIM};

/// Geometry and jet of one field at one point, in any scalar algebra.
pub struct Local<T> {
    n: usize,
    x: [T; MAX_DIM],
    r: T,
    xhat: [T; MAX_DIM],
    jet: Jet2<T>,
}

impl<T: Scalar> Local<T> {
    pub fn new(x: &[T], jet: Jet2<T>) -> Result<Self, EvalError> {
        let n = x.len();
        let r = jet::norm(x)?;
        let inv = r.recip()?;
        let mut xs = [T::constant(0.0); MAX_DIM];
        let mut xhat = [T::constant(0.0); MAX_DIM];
        for i in 0..n {
            xs[i] = x[i];
            xhat[i] = x[i] * inv;
        }
        Ok(Self {
            n,
            x: xs,
            r,
            xhat,
            jet,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn xhat(&self, i: usize) -> T {
        self.xhat[i]
    }

    pub fn jet(&self) -> &Jet2<T> {
        &self.jet
    }

    pub fn value(&self) -> T {
        self.jet.value
    }

    /// x̂·∇f
    pub fn radial_d1(&self) -> T {
        let mut acc = T::constant(0.0);
        for i in 0..self.n {
            acc = acc + self.xhat[i] * self.jet.partial(i);
        }
        acc
    }

    /// x̂ᵀ(∇²f)x̂
    pub fn radial_d2(&self) -> T {
        let mut acc = T::constant(0.0);
        for j in 0..self.n {
            let mut row = T::constant(0.0);
            for i in 0..self.n {
                row = row + self.jet.hessian(i, j) * self.xhat[i];
            }
            acc = acc + row * self.xhat[j];
        }
        acc
    }

    pub fn laplacian(&self) -> T {
        self.jet.trace()
    }

    /// L_j f = ∂_j f − x̂_j ∂_r f
    pub fn spherical(&self, j: usize) -> T {
        self.jet.partial(j) - self.xhat[j] * self.radial_d1()
    }

    /// L_j f for every j as first-order jets in x, from one nested pass over
    /// the gradient of f.
    pub fn tangential_jets(&self) -> Result<[Jet1<T>; MAX_DIM], EvalError> {
        let n = self.n;
        let xs = jet::jet1_coordinates(&self.x[..n]);
        let rinv = jet::norm(&xs)?.recip()?;
        let mut xhat = [Jet1::<T>::constant_jet(T::constant(0.0)); MAX_DIM];
        let mut grads = [Jet1::<T>::constant_jet(T::constant(0.0)); MAX_DIM];
        let mut d1 = Jet1::<T>::constant_jet(T::constant(0.0));
        for k in 0..n {
            xhat[k] = xs[k] * rinv;
            grads[k] = self.jet.partial_jet(k);
            d1 = d1 + xhat[k] * grads[k];
        }
        let mut out = [Jet1::<T>::constant_jet(T::constant(0.0)); MAX_DIM];
        for j in 0..n {
            out[j] = grads[j] - xhat[j] * d1;
        }
        Ok(out)
    }

    pub fn atoms(&self, angular: bool) -> Result<Atoms<T>, EvalError> {
        let n = self.n;
        let zero = T::constant(0.0);
        let mut atoms = Atoms {
            n,
            r: self.r,
            value: self.value(),
            d1: self.radial_d1(),
            d2: self.radial_d2(),
            lap: self.laplacian(),
            l: [zero; MAX_DIM],
            drl: [zero; MAX_DIM],
            l2: [zero; MAX_DIM],
            sum_l2: zero,
            angular,
        };
        if angular {
            let tj = self.tangential_jets()?;
            let mut sum = zero;
            for j in 0..n {
                let h = &tj[j];
                let mut dr = zero;
                for i in 0..n {
                    dr = dr + self.xhat[i] * h.partial(i);
                }
                atoms.l[j] = h.value;
                atoms.drl[j] = dr;
                atoms.l2[j] = h.partial(j) - self.xhat[j] * dr;
                sum = sum + atoms.l2[j];
            }
            atoms.sum_l2 = sum;
        }
        Ok(atoms)
    }
}

/// Pointwise primitive quantities an operator normal form is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Value,
    RadialD1,
    RadialD2,
    Laplacian,
    SphericalL(usize),
    RadialDSphericalL(usize),
    SphericalL2(usize),
    SumSphericalL2,
}

impl Atom {
    pub fn order(self) -> usize {
        match self {
            Atom::Value => 0,
            Atom::RadialD1 | Atom::SphericalL(_) => 1,
            _ => 2,
        }
    }

    pub fn is_angular(self) -> bool {
        matches!(
            self,
            Atom::SphericalL(_)
                | Atom::RadialDSphericalL(_)
                | Atom::SphericalL2(_)
                | Atom::SumSphericalL2
        )
    }
}

/// Atom values at one point.
#[derive(Clone, Copy, Debug)]
pub struct Atoms<T> {
    pub n: usize,
    pub r: T,
    pub value: T,
    pub d1: T,
    pub d2: T,
    pub lap: T,
    pub l: [T; MAX_DIM],
    pub drl: [T; MAX_DIM],
    pub l2: [T; MAX_DIM],
    pub sum_l2: T,
    pub angular: bool,
}

impl<T: Scalar> Atoms<T> {
    pub fn get(&self, atom: Atom) -> T {
        debug_assert!(self.angular || !atom.is_angular());
        match atom {
            Atom::Value => self.value,
            Atom::RadialD1 => self.d1,
            Atom::RadialD2 => self.d2,
            Atom::Laplacian => self.lap,
            Atom::SphericalL(j) => self.l[j],
            Atom::RadialDSphericalL(j) => self.drl[j],
            Atom::SphericalL2(j) => self.l2[j],
            Atom::SumSphericalL2 => self.sum_l2,
        }
    }

    /// A f = ∂_r² f + (n−1)/r ∂_r f
    pub fn bessel(&self) -> Result<T, EvalError> {
        Ok(self.d2 + self.d1 * self.r.recip()? * (self.n as f64 - 1.0))
    }
}
