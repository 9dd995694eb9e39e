import { IvpSuiteError, SessionClosedError } from "./errors.js";
import {
  type EvalResult,
  type FamilyInfo,
  type RunOptions,
  type RunResult,
  Session,
  type SessionOptions,
} from "./session.js";

export { IvpSuiteError, SessionClosedError, Session };
export type { EvalResult, FamilyInfo, RunOptions, RunResult, SessionOptions };

export type Overrides = Record<string, number | number[] | string>;

/**
 * An opened problem instance living inside the library process.
 *
 * The handle stays valid until {@link ProblemHandle.close} or the owning
 * session shuts down; using a closed handle rejects with a typed error
 * rather than crashing.
 */
export class ProblemHandle {
  readonly family: string;
  readonly preset: string;
  readonly numVars: number;
  readonly timeSpan: [number, number];
  readonly y0: number[];

  private id: number | null;
  private session: Session;

  private constructor(session: Session, doc: any) {
    this.session = session;
    this.id = doc.handle;
    this.family = doc.name;
    this.preset = doc.preset;
    this.numVars = doc.num_vars;
    this.timeSpan = [doc.time_span[0], doc.time_span[1]];
    this.y0 = doc.y0;
  }

  static async open(
    session: Session,
    family: string,
    preset = "Canonical",
    overrides: Overrides = {},
  ): Promise<ProblemHandle> {
    const doc = await session.request("open_preset", { family, preset, overrides });
    return new ProblemHandle(session, doc);
  }

  private handleId(): number {
    if (this.id === null) {
      throw new IvpSuiteError("ClosedHandle", "problem handle is closed");
    }
    return this.id;
  }

  /** Evaluate dy/dt at (t, y); numerically identical to the library's f. */
  async evalF(t: number, y: readonly number[]): Promise<number[]> {
    const doc = await this.session.request("eval_f", {
      handle: this.handleId(),
      t,
      y: Array.from(y),
    });
    return doc.f;
  }

  /** Like {@link evalF}, also returning the raw IEEE bytes as hex. */
  async evalFWithBytes(t: number, y: readonly number[]): Promise<EvalResult> {
    const doc = await this.session.request("eval_f", {
      handle: this.handleId(),
      t,
      y: Array.from(y),
      encoding: "hex",
    });
    return { f: doc.f, hex: doc.hex };
  }

  /** Adaptive integration over the problem's time span. */
  async run(options: RunOptions = {}): Promise<RunResult> {
    const doc = await this.session.request("run", {
      handle: this.handleId(),
      options: {
        abs_tol: options.absTol,
        rel_tol: options.relTol,
        max_step: options.maxStep,
      },
    });
    return { times: doc.times, states: doc.states, status: doc.status };
  }

  async close(): Promise<void> {
    if (this.id === null) {
      return;
    }
    const id = this.id;
    this.id = null;
    await this.session.request("close", { handle: id });
  }
}

/** Open a preset in a dedicated scope: session reuse is the caller's job. */
export async function openPreset(
  session: Session,
  family: string,
  preset = "Canonical",
  overrides: Overrides = {},
): Promise<ProblemHandle> {
  return ProblemHandle.open(session, family, preset, overrides);
}

/** Hex of the little-endian IEEE-754 bytes of a float64 array. */
export function float64Hex(values: readonly number[]): string {
  const buf = Buffer.alloc(values.length * 8);
  values.forEach((v, i) => buf.writeDoubleLE(v, i * 8));
  return buf.toString("hex");
}
