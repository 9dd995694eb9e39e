import { type ChildProcessWithoutNullStreams, spawn } from "node:child_process";
import { createInterface, type Interface } from "node:readline";

import { IvpSuiteError, SessionClosedError } from "./errors.js";

interface Pending {
  resolve: (value: any) => void;
  reject: (err: Error) => void;
}

export interface SessionOptions {
  /** Python executable used to host the library (default "python3"). */
  python?: string;
  /** Extra arguments placed before `-m ivpsuite.cli rpc-serve`. */
  pythonArgs?: string[];
}

export interface RunOptions {
  absTol?: number;
  relTol?: number;
  maxStep?: number;
}

export interface RunResult {
  times: number[];
  states: number[][];
  status: string;
}

export interface FamilyInfo {
  family: string;
  presets: string[];
  numVarsExpr: string;
  description: string;
}

export interface EvalResult {
  f: number[];
  /** Little-endian IEEE-754 bytes of `f`, hex encoded (when requested). */
  hex?: string;
}

/**
 * One library process reached over line-delimited JSON on stdio.
 *
 * The transport is data-only: vectors in, vectors out.  Numbers cross the
 * boundary as shortest-round-trip decimal and therefore survive bit for
 * bit in both directions.
 */
export class Session {
  private child: ChildProcessWithoutNullStreams;
  private reader: Interface;
  private pending = new Map<number, Pending>();
  private nextId = 1;
  private closed = false;

  constructor(options: SessionOptions = {}) {
    const python = options.python ?? "python3";
    const args = [...(options.pythonArgs ?? []), "-m", "ivpsuite.cli", "rpc-serve"];
    this.child = spawn(python, args, { stdio: ["pipe", "pipe", "pipe"] });
    this.reader = createInterface({ input: this.child.stdout });
    this.reader.on("line", (line) => this.onLine(line));
    this.child.on("exit", () => this.failAll(new SessionClosedError("library process exited")));
  }

  private onLine(line: string): void {
    let doc: any;
    try {
      doc = JSON.parse(line);
    } catch {
      return;
    }
    const entry = this.pending.get(doc.id);
    if (entry === undefined) {
      return;
    }
    this.pending.delete(doc.id);
    if (doc.ok) {
      entry.resolve(doc);
    } else {
      entry.reject(new IvpSuiteError(doc.code ?? "Unknown", doc.message ?? "unknown error"));
    }
  }

  private failAll(err: Error): void {
    for (const entry of this.pending.values()) {
      entry.reject(err);
    }
    this.pending.clear();
  }

  request(op: string, payload: Record<string, unknown> = {}): Promise<any> {
    if (this.closed) {
      return Promise.reject(new SessionClosedError());
    }
    const id = this.nextId++;
    const line = JSON.stringify({ id, op, ...payload }) + "\n";
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
      this.child.stdin.write(line, (err) => {
        if (err) {
          this.pending.delete(id);
          reject(err);
        }
      });
    });
  }

  async listFamilies(): Promise<FamilyInfo[]> {
    const doc = await this.request("list");
    return doc.families.map((f: any) => ({
      family: f.family,
      presets: f.presets,
      numVarsExpr: f.num_vars_expr,
      description: f.description,
    }));
  }

  async health(): Promise<{ handles: number; rssKb: number | null }> {
    const doc = await this.request("health");
    return { handles: doc.handles, rssKb: doc.rss_kb };
  }

  async close(): Promise<void> {
    if (this.closed) {
      return;
    }
    this.closed = true;
    await new Promise<void>((resolve) => {
      const line = JSON.stringify({ id: this.nextId++, op: "shutdown" }) + "\n";
      this.child.stdin.write(line, () => resolve());
    }).catch(() => undefined);
    this.child.stdin.end();
    this.child.kill();
    this.reader.close();
    this.failAll(new SessionClosedError());
  }
}
