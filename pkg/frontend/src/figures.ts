/**
 * Figure catalogue: each id maps the simulation CSVs onto one chart.
 *
 * fig2        position-error growth, one curve per accuracy setting
 * fig3        E/P/J drift of the exact schemes (log-log)
 * fig4..fig6  E/P/J drift of the large-scale approximations
 * fig7        center-of-mass position/velocity error vs an exact run
 * fig8        orientation (quaternion / angular velocity) error
 * fig9        total runtime vs molecule size with a fitted trend
 * fig10       per-scheme runtime ratio against exact Cartesian
 */
import { SchemaError, Table, column, requireColumns } from "./csv.js";
import { Chart, Series } from "./svg.js";

export interface FigureSpec {
  id: string;
  description: string;
  build(tables: Table[]): Chart;
}

const epsOf = (t: Table): number => Number(t.meta["eps_tau"] ?? NaN);
const schemeOf = (t: Table): string => t.meta["scheme"] ?? t.path;

function errorCurves(tables: Table[], columns: string[],
                     label: (t: Table, col: string) => string): Series[] {
  const series: Series[] = [];
  for (const t of tables) {
    requireColumns(t, ["t_ps", ...columns]);
    const x = column(t, "t_ps");
    for (const col of columns) {
      series.push({ label: label(t, col), x, y: column(t, col) });
    }
  }
  return series;
}

function driftChart(id: string, tables: Table[], col: string,
                    yLabel: string, xScale: "linear" | "log"): Chart {
  return {
    title: `${id}: ${yLabel} drift`,
    xLabel: "t (ps)",
    yLabel,
    xScale,
    yScale: "log",
    series: errorCurves(tables, [col], (t) => schemeOf(t)),
  };
}

/** Least-squares straight line through (x, log10 y). */
function logTrend(x: number[], y: number[]): { a: number; b: number } {
  const n = x.length;
  const ly = y.map(Math.log10);
  const mx = x.reduce((s, v) => s + v, 0) / n;
  const my = ly.reduce((s, v) => s + v, 0) / n;
  let [sxx, sxy] = [0, 0];
  for (let i = 0; i < n; i++) {
    sxx += (x[i] - mx) ** 2;
    sxy += (x[i] - mx) * (ly[i] - my);
  }
  const b = sxy / sxx;
  return { a: my - b * mx, b };
}

export const FIGURES: Record<string, FigureSpec> = {
  fig2: {
    id: "fig2",
    description: "position-error divergence, one curve per eps_tau",
    build: (tables) => ({
      title: "fig2: trajectory divergence vs reference",
      xLabel: "t (ps)",
      yLabel: "position error (angstrom)",
      xScale: "linear",
      yScale: "log",
      series: errorCurves(
        [...tables].sort((u, v) => epsOf(u) - epsOf(v)),
        ["err_x"],
        (t) => `${schemeOf(t)} eps=${epsOf(t).toExponential(0)}`),
    }),
  },
  fig3: {
    id: "fig3",
    description: "E/P/J drift of the exact schemes (log-log)",
    build: (tables) => ({
      title: "fig3: conservation of the exact schemes",
      xLabel: "t (ps)",
      yLabel: "relative drift",
      xScale: "log",
      yScale: "log",
      series: errorCurves(tables, ["err_E", "err_P", "err_J"],
                          (t, col) => `${schemeOf(t)} ${col}`),
    }),
  },
  fig4: {
    id: "fig4",
    description: "energy drift of the large-scale approximations",
    build: (tables) => driftChart("fig4", tables, "err_E",
                                  "relative energy", "linear"),
  },
  fig5: {
    id: "fig5",
    description: "momentum drift of the large-scale approximations",
    build: (tables) => driftChart("fig5", tables, "err_P",
                                  "relative momentum", "linear"),
  },
  fig6: {
    id: "fig6",
    description: "angular-momentum drift of the approximations",
    build: (tables) => driftChart("fig6", tables, "err_J",
                                  "relative angular momentum", "linear"),
  },
  fig7: {
    id: "fig7",
    description: "center-of-mass position/velocity error",
    build: (tables) => ({
      title: "fig7: center-of-mass accuracy",
      xLabel: "t (ps)",
      yLabel: "error (angstrom, angstrom/ps)",
      xScale: "linear",
      yScale: "log",
      series: errorCurves(tables, ["err_x_cm", "err_v_cm"],
                          (t, col) => `${schemeOf(t)} ${col}`),
    }),
  },
  fig8: {
    id: "fig8",
    description: "orientation (quaternion, angular velocity) error",
    build: (tables) => ({
      title: "fig8: orientation accuracy",
      xLabel: "t (ps)",
      yLabel: "error",
      xScale: "linear",
      yScale: "log",
      series: errorCurves(tables, ["err_q", "err_omega"],
                          (t, col) => `${schemeOf(t)} ${col}`),
    }),
  },
  fig9: {
    id: "fig9",
    description: "exact-Cartesian runtime vs molecule size with trend",
    build: (tables) => {
      const series: Series[] = [];
      const [xs, ys]: [number[], number[]] = [[], []];
      for (const t of tables) {
        requireColumns(t, ["scheme", "n_atoms", "total_wall_seconds"]);
        for (const row of t.rows) {
          if (row["scheme"] !== "cartesian") continue;
          xs.push(Number(row["n_atoms"]));
          ys.push(Number(row["total_wall_seconds"]));
        }
      }
      series.push({ label: "cartesian total", x: xs, y: ys,
                    line: false, points: true });
      const annotations: string[] = [];
      if (xs.length >= 2) {
        const { a, b } = logTrend(xs, ys);
        const [lo, hi] = [Math.min(...xs), Math.max(...xs)];
        series.push({
          label: "fitted trend",
          x: [lo, hi],
          y: [10 ** (a + b * lo), 10 ** (a + b * hi)],
          dashed: true,
        });
        annotations.push(
          `fit: t = 10^(${a.toPrecision(3)} + N/${(1 / b).toPrecision(3)}) s`);
      }
      return {
        title: "fig9: runtime vs molecule size",
        xLabel: "atoms N",
        yLabel: "wall time (s)",
        xScale: "linear",
        yScale: "log",
        series,
        annotations,
      };
    },
  },
  fig10: {
    id: "fig10",
    description: "per-scheme runtime ratio against exact Cartesian",
    build: (tables) => {
      const byScheme = new Map<string, { x: number[]; y: number[] }>();
      for (const t of tables) {
        requireColumns(t, ["scheme", "n_atoms", "ratio_vs_cartesian"]);
        for (const row of t.rows) {
          const scheme = String(row["scheme"]);
          const entry = byScheme.get(scheme) ?? { x: [], y: [] };
          entry.x.push(Number(row["n_atoms"]));
          entry.y.push(Number(row["ratio_vs_cartesian"]));
          byScheme.set(scheme, entry);
        }
      }
      return {
        title: "fig10: relative runtime vs exact Cartesian",
        xLabel: "atoms N",
        yLabel: "wall-time ratio",
        xScale: "linear",
        yScale: "log",
        series: [...byScheme.entries()].sort().map(([scheme, d]) => ({
          label: scheme, x: d.x, y: d.y, points: true,
        })),
      };
    },
  },
};

export function figureSpec(id: string): FigureSpec {
  const spec = FIGURES[id];
  if (!spec) {
    throw new SchemaError(
      `unknown figure id '${id}' (valid: ${Object.keys(FIGURES).join(", ")})`);
  }
  return spec;
}
