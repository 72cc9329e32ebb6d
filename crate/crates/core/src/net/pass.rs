//! Batched forward pass with input tangents, and its reverse sweep.
//!
//! Activations are kept as a value block (`n x width`) and, when input
//! gradients are requested, a tangent block (`3n x width`) holding
//! `d activation / d x_j` for `j = 0, 1, 2` stacked row-wise. Linear layers
//! act on both blocks; biases only touch values. A sine layer maps
//! `z -> sin(w z)` on values and `t -> w cos(w z) * t` on tangents.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, ArrayViewMut1, ArrayViewMut2, Axis};

use std::rc::Rc;

use super::{Network, Real};

/// Rows per evaluation chunk for inference-only batches.
pub(crate) const EVAL_CHUNK: usize = 4096;

#[derive(Debug, Clone)]
pub(crate) struct Stack<T> {
    pub val: Array2<T>,
    pub tan: Option<Array2<T>>,
}

impl<T: Real> Stack<T> {
    fn add_assign(&mut self, other: &Stack<T>) {
        self.val += &other.val;
        if let (Some(a), Some(b)) = (self.tan.as_mut(), other.tan.as_ref()) {
            *a += b;
        }
    }
}

struct SineRecord<T> {
    layer: usize,
    input: Rc<Stack<T>>,
    /// Pre-activation tangents; present when the pass carries tangents.
    z_tan: Option<Array2<T>>,
    sin: Array2<T>,
    /// `omega * cos(omega * z)`
    dcos: Array2<T>,
}

pub(crate) struct Tape<T> {
    n: usize,
    records: Vec<SineRecord<T>>,
    last: Option<Rc<Stack<T>>>,
    pub values: Vec<T>,
    pub grads: Option<Vec<[T; 3]>>,
}

fn linear<T: Real>(net: &Network<T>, layer: usize, input: &Stack<T>) -> Stack<T> {
    let w = net.weight(layer);
    let mut val = input.val.dot(&w.t());
    val += &net.bias(layer);
    let tan = input.tan.as_ref().map(|t| t.dot(&w.t()));
    Stack { val, tan }
}

/// First-layer input: the points themselves and the identity tangent.
fn input_stack<T: Real>(points: &[[T; 3]], tangents: bool) -> Stack<T> {
    let n = points.len();
    let val = Array2::from_shape_fn((n, 3), |(i, c)| points[i][c]);
    let tan = tangents.then(|| {
        Array2::from_shape_fn((3 * n, 3), |(r, c)| if r / n == c { T::one() } else { T::zero() })
    });
    Stack { val, tan }
}

impl<T: Real> Tape<T> {
    /// Runs the network on `points`. With `record`, keeps what the reverse sweep needs.
    pub fn run(net: &Network<T>, points: &[[T; 3]], tangents: bool, record: bool) -> Self {
        let n = points.len();
        let omega = T::of(net.arch().omega0);
        let mut records = Vec::new();

        let mut sine_layer = |layer: usize, input: &Rc<Stack<T>>| -> Stack<T> {
            let z = linear(net, layer, input);
            let mut sin = Array2::<T>::zeros(z.val.raw_dim());
            let mut dcos = (z.tan.is_some() || record).then(|| Array2::<T>::zeros(z.val.raw_dim()));
            T::sine(
                omega,
                z.val.as_slice().expect("standard layout"),
                sin.as_slice_mut().expect("standard layout"),
                dcos.as_mut().map(|d| d.as_slice_mut().expect("standard layout")),
            );
            let scale = |mut t: Array2<T>, d: &Array2<T>| {
                for j in 0..3 {
                    let mut blk = t.slice_mut(s![j * n..(j + 1) * n, ..]);
                    blk *= d;
                }
                t
            };
            if record {
                let dcos = dcos.expect("recorded passes keep the derivative");
                let out = Stack {
                    val: sin.clone(),
                    tan: z.tan.clone().map(|t| scale(t, &dcos)),
                };
                records.push(SineRecord {
                    layer,
                    input: Rc::clone(input),
                    z_tan: z.tan,
                    sin,
                    dcos,
                });
                out
            } else {
                let tan = match (z.tan, dcos.as_ref()) {
                    (Some(t), Some(d)) => Some(scale(t, d)),
                    _ => None,
                };
                Stack { val: sin, tan }
            }
        };

        let mut h = Rc::new(sine_layer(0, &Rc::new(input_stack(points, tangents))));
        for block in 0..net.arch().blocks() {
            let first = 1 + 2 * block;
            let a = Rc::new(sine_layer(first, &h));
            let mut b = sine_layer(first + 1, &a);
            b.add_assign(&h);
            h = Rc::new(b);
        }

        let head = net.layers().len() - 1;
        let w = net.weight(head);
        let w = w.row(0);
        let bias = net.bias(head)[0];
        let values = h.val.dot(&w).mapv(|v| v + bias).to_vec();
        let grads = h.tan.as_ref().map(|t| {
            let g = t.dot(&w);
            (0..n).map(|i| [g[i], g[n + i], g[2 * n + i]]).collect()
        });

        Tape {
            n,
            records,
            last: record.then_some(h),
            values,
            grads,
        }
    }

    /// Accumulates `d loss / d params` into `out` given `d loss / d f` per
    /// point and, for tangent passes, `d loss / d grad_x f` per point.
    pub fn backward(
        &self,
        net: &Network<T>,
        value_bar: &[T],
        grad_bar: Option<&[[T; 3]]>,
        out: &mut [T],
    ) {
        let n = self.n;
        let last = self.last.as_ref().expect("tape was not recorded");
        let head = net.layers().len() - 1;
        let shape = net.layers()[head];
        let w_head = net.weight(head);
        let w_head = w_head.row(0);

        // head: f = h . w + b,  g_j = t_j . w
        let fbar = Array1::from(value_bar.to_vec());
        let gbar = grad_bar.map(|g| {
            Array1::from_shape_fn(3 * n, |r| g[r % n][r / n])
        });
        {
            let mut wg = ArrayViewMut1::from(&mut out[shape.weights()]);
            wg.scaled_add(T::one(), &last.val.t().dot(&fbar));
            if let (Some(t), Some(gb)) = (last.tan.as_ref(), gbar.as_ref()) {
                wg.scaled_add(T::one(), &t.t().dot(gb));
            }
        }
        out[shape.biases()][0] += fbar.sum();
        let outer = |c: &Array1<T>| {
            let col = c.view().insert_axis(Axis(1));
            let row = w_head.insert_axis(Axis(0));
            col.dot(&row)
        };
        let mut hbar = Stack {
            val: outer(&fbar),
            tan: gbar.as_ref().map(outer),
        };

        let blocks = net.arch().blocks();
        for block in (0..blocks).rev() {
            let rec_a = &self.records[1 + 2 * block];
            let rec_b = &self.records[2 + 2 * block];
            let abar = sine_backward(net, rec_b, &hbar, out, true).expect("input grad");
            let mut rbar = sine_backward(net, rec_a, &abar, out, true).expect("input grad");
            rbar.add_assign(&hbar);
            hbar = rbar;
        }
        sine_backward(net, &self.records[0], &hbar, out, false);
    }
}

fn sine_backward<T: Real>(
    net: &Network<T>,
    rec: &SineRecord<T>,
    abar: &Stack<T>,
    out: &mut [T],
    need_input: bool,
) -> Option<Stack<T>> {
    let omega = T::of(net.arch().omega0);
    let omega2 = omega * omega;
    let mut zbar_val = Array2::<T>::zeros(rec.sin.raw_dim());
    let zbar_tan = match (abar.tan.as_ref(), rec.z_tan.as_ref()) {
        (Some(tbar), Some(z_tan)) => {
            let mut zbar_tan = Array2::<T>::zeros(tbar.raw_dim());
            let m = rec.sin.len();
            let tbar = tbar.as_standard_layout();
            let abar_val = abar.val.as_standard_layout();
            let (tb, zt) = (contiguous(&tbar), contiguous(z_tan));
            let (av, dc, sn) = (contiguous(&abar_val), contiguous(&rec.dcos), contiguous(&rec.sin));
            let zv = zbar_val.as_slice_mut().expect("fresh array");
            let ztb = zbar_tan.as_slice_mut().expect("fresh array");
            let (tb0, tb1, tb2) = (&tb[..m], &tb[m..2 * m], &tb[2 * m..3 * m]);
            let (zt0, zt1, zt2) = (&zt[..m], &zt[m..2 * m], &zt[2 * m..3 * m]);
            let (o0, rest) = ztb.split_at_mut(m);
            let (o1, o2) = rest.split_at_mut(m);
            let (av, dc, sn, zv) = (&av[..m], &dc[..m], &sn[..m], &mut zv[..m]);
            for e in 0..m {
                let d = dc[e];
                let acc = tb0[e] * zt0[e] + tb1[e] * zt1[e] + tb2[e] * zt2[e];
                zv[e] = av[e] * d - omega2 * sn[e] * acc;
                o0[e] = tb0[e] * d;
                o1[e] = tb1[e] * d;
                o2[e] = tb2[e] * d;
            }
            Some(zbar_tan)
        }
        _ => {
            zbar_val = &abar.val * &rec.dcos;
            None
        }
    };

    let shape = net.layers()[rec.layer];
    {
        let mut wg =
            ArrayViewMut2::from_shape((shape.rows, shape.cols), &mut out[shape.weights()]).expect("layout");
        general_mat_mul(T::one(), &zbar_val.t(), &rec.input.val, T::one(), &mut wg);
        if let (Some(zt), Some(it)) = (zbar_tan.as_ref(), rec.input.tan.as_ref()) {
            general_mat_mul(T::one(), &zt.t(), it, T::one(), &mut wg);
        }
    }
    {
        let mut bg = ArrayViewMut1::from(&mut out[shape.biases()]);
        bg += &zbar_val.sum_axis(Axis(0));
    }

    need_input.then(|| {
        let w: ArrayView2<'_, T> = net.weight(rec.layer);
        Stack {
            val: zbar_val.dot(&w),
            tan: zbar_tan.as_ref().map(|zt| zt.dot(&w)),
        }
    })
}

fn contiguous<S: ndarray::Data>(a: &ndarray::ArrayBase<S, ndarray::Ix2>) -> &[S::Elem] {
    a.as_slice().expect("standard layout")
}
