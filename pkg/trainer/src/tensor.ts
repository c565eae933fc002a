// ---------------------------------------------------------------------------
// Tiny dense kernels over row-major Float64Arrays with explicit offsets,
// so model code can address node rows inside one flat buffer without
// slicing. Shapes are the caller's responsibility.
// ---------------------------------------------------------------------------

/** out[outOff..] = W (rows x cols) * x[xOff..]. */
export function matvecInto(
  W: Float64Array,
  x: Float64Array,
  xOff: number,
  out: Float64Array,
  outOff: number,
  rows: number,
  cols: number,
): void {
  for (let r = 0; r < rows; r++) {
    let acc = 0;
    const base = r * cols;
    for (let c = 0; c < cols; c++) acc += W[base + c]! * x[xOff + c]!;
    out[outOff + r] = acc;
  }
}

/** out[outOff..] += W^T (cols from a rows x cols W) * y[yOff..]. */
export function matTvecAdd(
  W: Float64Array,
  y: Float64Array,
  yOff: number,
  out: Float64Array,
  outOff: number,
  rows: number,
  cols: number,
): void {
  for (let r = 0; r < rows; r++) {
    const yr = y[yOff + r]!;
    if (yr === 0) continue;
    const base = r * cols;
    for (let c = 0; c < cols; c++) out[outOff + c] += W[base + c]! * yr;
  }
}

/** G (rows x cols) += y[yOff..rows] outer x[xOff..cols]. */
export function addOuter(
  G: Float64Array,
  y: Float64Array,
  yOff: number,
  x: Float64Array,
  xOff: number,
  rows: number,
  cols: number,
): void {
  for (let r = 0; r < rows; r++) {
    const yr = y[yOff + r]!;
    if (yr === 0) continue;
    const base = r * cols;
    for (let c = 0; c < cols; c++) G[base + c] += yr * x[xOff + c]!;
  }
}

/** a[aOff..] dot b[bOff..], length n. */
export function dotOff(
  a: Float64Array,
  aOff: number,
  b: Float64Array,
  bOff: number,
  n: number,
): number {
  let acc = 0;
  for (let i = 0; i < n; i++) acc += a[aOff + i]! * b[bOff + i]!;
  return acc;
}

/** out[outOff..] += s * x[xOff..], length n. */
export function axpy(
  s: number,
  x: Float64Array,
  xOff: number,
  out: Float64Array,
  outOff: number,
  n: number,
): void {
  if (s === 0) return;
  for (let i = 0; i < n; i++) out[outOff + i] += s * x[xOff + i]!;
}
