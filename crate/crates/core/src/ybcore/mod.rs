//! Parameter-dependent two-site maps, their lifts to N-site tuples, transfer
//! maps, and checkers for the Yang-Baxter relation and its consequences.
//!
//! Site indices in this module's public API are 1-based and cyclic: index
//! `i` and `i + N` name the same site of an `N`-tuple.

mod check;
mod transfer;

use std::fmt::Debug;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::{char_poly_of_pencil_product, char_poly_of_product, Matrix};
use crate::scalar::Scalar;

pub use check::{
    check_lax_refactorization, check_reversible, check_transfer_laws, check_transfer_laws_sampled,
    check_yb, lax_residual, reversibility_residual, transfer_law_residuals, yb_residual,
    LaxAssignment,
};
pub use transfer::{lift_two_site, site_index, transfer_map, transfer_product};

/// A point of the single-site phase space `X`.
pub trait SiteValue<T: Scalar>: Clone + Debug {
    /// Largest entrywise difference between the phase points `self` and
    /// `other` represent. Representatives of the same point (e.g. rescaled
    /// `(p, q)` pairs) must have deviation zero.
    fn deviation(&self, other: &Self) -> Result<T>;

    /// Size of the point, used to make float residuals relative.
    fn magnitude(&self) -> T;

    /// A deliberately wrong nearby point, used by decoy maps.
    fn perturbed(&self) -> Self;
}

/// `R(lambda, mu): X x X -> X x X`.
pub trait TwoSiteMap<T: Scalar> {
    type Value: SiteValue<T>;

    fn apply(
        &self,
        x: &Self::Value,
        lambda: &T,
        y: &Self::Value,
        mu: &T,
    ) -> Result<(Self::Value, Self::Value)>;

    /// Domain predicate; consistent with `apply` returning `Err`.
    fn is_defined(&self, x: &Self::Value, lambda: &T, y: &Self::Value, mu: &T) -> bool {
        self.apply(x, lambda, y, mu).is_ok()
    }

    fn name(&self) -> String;
}

/// A two-site map with a Lax matrix `L(x, lambda; zeta)` satisfying
/// `L(x,lambda) L(y,mu) = L(y~,mu) L(x~,lambda)`.
pub trait LaxMap<T: Scalar>: TwoSiteMap<T> {
    fn lax(&self, x: &Self::Value, lambda: &T, zeta: &T) -> Result<Matrix<T>>;

    /// `(A, B)` with `lax(x, lambda, zeta) = A + zeta B`, when the Lax
    /// matrix is affine in the spectral parameter.
    fn lax_pencil(&self, _x: &Self::Value, _lambda: &T) -> Result<Option<(Matrix<T>, Matrix<T>)>> {
        Ok(None)
    }
}

/// One slot of a [`SiteTuple`]: a site value with its attached parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Site<V, T> {
    pub value: V,
    pub param: T,
}

impl<V, T> Site<V, T> {
    pub fn new(value: V, param: T) -> Self {
        Self { value, param }
    }
}

/// Ordered phase point of the transfer dynamics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteTuple<V, T> {
    sites: Vec<Site<V, T>>,
}

impl<V: Clone, T: Scalar> SiteTuple<V, T> {
    pub fn new(sites: Vec<Site<V, T>>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidInput("empty site tuple".into()));
        }
        Ok(Self { sites })
    }

    pub fn from_parts(values: Vec<V>, params: Vec<T>) -> Result<Self> {
        if values.len() != params.len() {
            return Err(Error::InvalidInput(format!(
                "{} values but {} parameters",
                values.len(),
                params.len()
            )));
        }
        Self::new(
            values
                .into_iter()
                .zip(params)
                .map(|(value, param)| Site { value, param })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Site<V, T>] {
        &self.sites
    }

    /// Site by 1-based cyclic index.
    pub fn site(&self, i: usize) -> &Site<V, T> {
        &self.sites[site_index(i, self.len())]
    }

    pub fn values(&self) -> impl Iterator<Item = &V> {
        self.sites.iter().map(|s| &s.value)
    }

    pub fn params(&self) -> Vec<T> {
        self.sites.iter().map(|s| s.param.clone()).collect()
    }

    pub(crate) fn sites_mut(&mut self) -> &mut [Site<V, T>] {
        &mut self.sites
    }

    /// Replaces the value at a 1-based cyclic index, keeping its parameter.
    pub fn with_value(&self, i: usize, value: V) -> Self {
        let mut out = self.clone();
        let k = site_index(i, self.len());
        out.sites[k].value = value;
        out
    }

    /// Maximum deviation over all slots, with the largest magnitude seen.
    pub fn deviation(&self, other: &Self) -> Result<(T, T)>
    where
        V: SiteValue<T>,
    {
        if self.len() != other.len() {
            return Err(Error::InvalidInput("tuples of different length".into()));
        }
        let mut dev = T::zero();
        let mut scale = T::zero();
        for (a, b) in self.sites.iter().zip(&other.sites) {
            let d = a.value.deviation(&b.value)?;
            let pd = (a.param.clone() - b.param.clone()).abs();
            for c in [d, pd] {
                if c > dev {
                    dev = c;
                }
            }
            let m = a.value.magnitude();
            if m > scale {
                scale = m;
            }
        }
        Ok((dev, scale))
    }
}

/// The swap `P(x, y) = (y, x)`, a trivial reversible Yang-Baxter map.
#[derive(Clone, Debug, Default)]
pub struct Permutation<V>(PhantomData<V>);

impl<V> Permutation<V> {
    pub fn new() -> Self {
        Self(PhantomData)
    }
}

impl<T: Scalar, V: SiteValue<T>> TwoSiteMap<T> for Permutation<V> {
    type Value = V;

    fn apply(&self, x: &V, _lambda: &T, y: &V, _mu: &T) -> Result<(V, V)> {
        Ok((y.clone(), x.clone()))
    }

    fn name(&self) -> String {
        "permutation".into()
    }
}

/// Decoy wrapper: applies the inner map and then perturbs the first output.
/// Breaks the Yang-Baxter relation, reversibility and the Lax identity, so
/// the checkers must report failure on it.
#[derive(Clone, Debug)]
pub struct Mutated<M>(pub M);

impl<T: Scalar, M: TwoSiteMap<T>> TwoSiteMap<T> for Mutated<M> {
    type Value = M::Value;

    fn apply(
        &self,
        x: &Self::Value,
        lambda: &T,
        y: &Self::Value,
        mu: &T,
    ) -> Result<(Self::Value, Self::Value)> {
        let (a, b) = self.0.apply(x, lambda, y, mu)?;
        Ok((a.perturbed(), b))
    }

    fn name(&self) -> String {
        format!("mutated {}", self.0.name())
    }
}

impl<T: Scalar, M: LaxMap<T>> LaxMap<T> for Mutated<M> {
    fn lax(&self, x: &Self::Value, lambda: &T, zeta: &T) -> Result<Matrix<T>> {
        self.0.lax(x, lambda, zeta)
    }

    fn lax_pencil(&self, x: &Self::Value, lambda: &T) -> Result<Option<(Matrix<T>, Matrix<T>)>> {
        self.0.lax_pencil(x, lambda)
    }
}

/// Ordered product `L(x_1, lambda_1; zeta) ... L(x_N, lambda_N; zeta)`,
/// site 1 leftmost.
pub fn monodromy<T: Scalar, M: LaxMap<T>>(
    map: &M,
    t: &SiteTuple<M::Value, T>,
    zeta: &T,
) -> Result<Matrix<T>> {
    let mut sites = t.sites().iter();
    let first = sites.next().expect("site tuples are non-empty");
    let mut acc = map.lax(&first.value, &first.param, zeta)?;
    for s in sites {
        acc = acc.mul(&map.lax(&s.value, &s.param, zeta)?)?;
    }
    Ok(acc)
}

/// Characteristic polynomial of [`monodromy`], computed without forming
/// the rational product (see [`char_poly_of_product`]).
pub fn monodromy_char_poly<T: Scalar, M: LaxMap<T>>(
    map: &M,
    t: &SiteTuple<M::Value, T>,
    zeta: &T,
) -> Result<Vec<T>> {
    let factors = t
        .sites()
        .iter()
        .map(|s| map.lax(&s.value, &s.param, zeta))
        .collect::<Result<Vec<_>>>()?;
    char_poly_of_product(&factors)
}

/// [`monodromy_char_poly`] at every sample, sharing the per-site work when
/// the map provides a [`LaxMap::lax_pencil`].
pub fn monodromy_char_polys<T: Scalar, M: LaxMap<T>>(
    map: &M,
    t: &SiteTuple<M::Value, T>,
    zetas: &[T],
) -> Result<Vec<Vec<T>>> {
    let pencils = t
        .sites()
        .iter()
        .map(|s| map.lax_pencil(&s.value, &s.param))
        .collect::<Result<Option<Vec<_>>>>()?;
    match pencils {
        Some(p) => char_poly_of_pencil_product(&p, zetas),
        None => zetas
            .iter()
            .map(|z| monodromy_char_poly(map, t, z))
            .collect(),
    }
}

/// Scalar site values (Adler-type maps on `X = R`).
impl<T: Scalar> SiteValue<T> for T {
    fn deviation(&self, other: &Self) -> Result<T> {
        Ok((self.clone() - other.clone()).abs())
    }

    fn magnitude(&self) -> T {
        self.abs()
    }

    fn perturbed(&self) -> Self {
        self.clone() + T::one()
    }
}
