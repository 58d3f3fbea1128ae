/** The four figure kinds. Each returns PNG bytes plus the annotations that
 * were drawn, so callers (and tests) can check them without decoding pixels. */

import { encodePng } from "./png.js";
import { Chart, padLinear, padLog, seriesColor } from "./plot.js";
import { LinearScale, LogScale } from "./scales.js";
import { readCsv, requireColumns, requireRows, SchemaError } from "./csv.js";
import { readSweep } from "./schemas.js";

export interface Figure {
  png: Buffer;
  annotations: Record<string, string>;
}

export function rateAnnotation(rate: number): string {
  return `rate ≈ ${rate.toFixed(2)}`;
}

export function convergenceFigure(inputPath: string): Figure {
  const sweep = readSweep(inputPath);
  const fields = Object.keys(sweep.errors).sort();
  if (fields.length === 0) throw new SchemaError(`${inputPath}: no error fields`);
  const chart = new Chart();
  const allErrs = fields.flatMap((f) => sweep.errors[f]);
  const [xlo, xhi] = padLog(sweep.eps);
  const [ylo, yhi] = padLog(allErrs);
  const xs = new LogScale(xlo, xhi, chart.x0, chart.x1);
  const ys = new LogScale(ylo, yhi, chart.y0, chart.y1);
  chart.frame(`CONVERGENCE TO THE ${sweep.model === "gk" ? "MAXWELL-STEFAN" : "BUSENBERG-TRAVIS"} LIMIT`,
              "EPS", "L2 ERROR", xs, ys);
  const annotations: Record<string, string> = {};
  const legend = fields.map((f, i) => {
    const ann = rateAnnotation(sweep.rates[f] ?? NaN);
    annotations[f] = ann;
    chart.series(sweep.eps, sweep.errors[f], xs, ys, seriesColor(i));
    return { label: `${f}: ${ann}`, color: seriesColor(i) };
  });
  chart.legend(legend);
  return { png: encodePng(chart.raster.width, chart.raster.height, chart.raster.pixels),
           annotations };
}

function traceFigure(inputPath: string, ycol: string, title: string,
                     ylabel: string): Figure {
  const t = readCsv(inputPath);
  requireColumns(t, ["t", ycol], inputPath);
  requireRows(t, inputPath);
  const tv = t.columns.get("t")!;
  const yv = t.columns.get(ycol)!;
  const chart = new Chart();
  const [xlo, xhi] = padLinear(tv);
  const [ylo, yhi] = padLinear(yv);
  const xs = new LinearScale(xlo, xhi, chart.x0, chart.x1);
  const ys = new LinearScale(ylo, yhi, chart.y0, chart.y1);
  chart.frame(title, "T", ylabel, xs, ys);
  chart.series(tv, yv, xs, ys, seriesColor(0), tv.length <= 80);
  const last = yv[yv.length - 1];
  const ann = `final ${ycol} = ${last.toPrecision(6)}`;
  return { png: encodePng(chart.raster.width, chart.raster.height, chart.raster.pixels),
           annotations: { [ycol]: ann } };
}

export function entropyTraceFigure(inputPath: string): Figure {
  return traceFigure(inputPath, "entropy", "ENTROPY TRACE", "ENTROPY");
}

export function raoTraceFigure(inputPath: string): Figure {
  return traceFigure(inputPath, "E_R", "RAO FUNCTIONAL DECAY", "E_R");
}

export function snapshotFigure(inputPath: string): Figure {
  const t = readCsv(inputPath);
  requireColumns(t, ["x"], inputPath);
  requireRows(t, inputPath);
  const xv = t.columns.get("x")!;
  const fields = t.header.filter((h) => h !== "x");
  if (fields.length === 0) throw new SchemaError(`${inputPath}: no field columns`);
  const chart = new Chart();
  const all = fields.flatMap((f) => t.columns.get(f)!);
  const xs = new LinearScale(Math.min(...xv), Math.max(...xv), chart.x0, chart.x1);
  const [ylo, yhi] = padLinear(all);
  const ys = new LinearScale(ylo, yhi, chart.y0, chart.y1);
  chart.frame("FIELD SNAPSHOT", "X", "FIELDS", xs, ys);
  const legend = fields.map((f, i) => {
    chart.series(xv, t.columns.get(f)!, xs, ys, seriesColor(i), false);
    return { label: f, color: seriesColor(i) };
  });
  chart.legend(legend);
  return { png: encodePng(chart.raster.width, chart.raster.height, chart.raster.pixels),
           annotations: {} };
}
