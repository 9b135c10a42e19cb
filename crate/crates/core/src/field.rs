//! Vector-field abstractions shared by the decision procedures and the
//! integrator.

/// An autonomous vector field `dx/dt = f(x)`.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;

    /// Writes `f(x)` into `dx`. Both slices have length [`dim`](Self::dim).
    fn rate(&self, x: &[f64], dx: &mut [f64]);

    fn rate_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut dx = vec![0.0; self.dim()];
        self.rate(x, &mut dx);
        dx
    }
}

/// A forced vector field `dx/dt = f(x, u)` with `controls()` inputs.
pub trait ControlledField: Sync {
    fn dim(&self) -> usize;
    fn controls(&self) -> usize;
    fn rate(&self, x: &[f64], u: &[f64], dx: &mut [f64]);
}

/// Adapts a closure into a [`VectorField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rate(&self, x: &[f64], dx: &mut [f64]) {
        (self.f)(x, dx)
    }
}

/// Adapts a closure into a [`ControlledField`].
pub struct FnControlledField<F> {
    dim: usize,
    controls: usize,
    f: F,
}

impl<F> FnControlledField<F>
where
    F: Fn(&[f64], &[f64], &mut [f64]) + Sync,
{
    pub fn new(dim: usize, controls: usize, f: F) -> Self {
        Self { dim, controls, f }
    }
}

impl<F> ControlledField for FnControlledField<F>
where
    F: Fn(&[f64], &[f64], &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn controls(&self) -> usize {
        self.controls
    }

    fn rate(&self, x: &[f64], u: &[f64], dx: &mut [f64]) {
        (self.f)(x, u, dx)
    }
}

/// The field with its sign flipped, used to integrate backwards in time.
pub struct Reversed<'a, V: ?Sized>(pub &'a V);

impl<V: VectorField + ?Sized> VectorField for Reversed<'_, V> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn rate(&self, x: &[f64], dx: &mut [f64]) {
        self.0.rate(x, dx);
        for v in dx.iter_mut() {
            *v = -*v;
        }
    }
}
