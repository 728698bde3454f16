//! Fixed-step classical Runge-Kutta integration of complex linear systems.

use num_complex::Complex64 as C64;

/// Right-hand side of `dx/dt = f(t, x)` on a flat complex vector.
pub trait ComplexOde {
    fn dim(&self) -> usize;
    fn derivative(&self, t: f64, x: &[C64], dx: &mut [C64]);
}

/// Classical fourth-order Runge-Kutta stepper with reusable scratch space.
pub struct Rk4 {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); dim];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    pub fn step<O: ComplexOde + ?Sized>(&mut self, ode: &O, t: f64, dt: f64, x: &mut [C64]) {
        let half = 0.5 * dt;
        ode.derivative(t, x, &mut self.k1);
        axpy(&mut self.tmp, x, half, &self.k1);
        ode.derivative(t + half, &self.tmp, &mut self.k2);
        axpy(&mut self.tmp, x, half, &self.k2);
        ode.derivative(t + half, &self.tmp, &mut self.k3);
        axpy(&mut self.tmp, x, dt, &self.k3);
        ode.derivative(t + dt, &self.tmp, &mut self.k4);
        let w = dt / 6.0;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += w * (self.k1[i] + 2.0 * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
    }
}

#[inline]
fn axpy(out: &mut [C64], x: &[C64], a: f64, k: &[C64]) {
    for ((o, &xi), &ki) in out.iter_mut().zip(x).zip(k) {
        *o = xi + a * ki;
    }
}

/// Splits `[t0, t1]` into whole steps no longer than `dt`.
pub(crate) fn step_plan(t0: f64, t1: f64, dt: f64) -> (usize, f64) {
    let span = t1 - t0;
    if span <= 0.0 {
        return (0, dt);
    }
    let steps = (span / dt - 1e-9).ceil().max(1.0) as usize;
    (steps, span / steps as f64)
}
