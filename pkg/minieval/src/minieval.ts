// Reader and evaluator for "QDAG 1" files: flat node records, one
// forward pass, no recursion.  Output lines must match the reference
// evaluator byte for byte, so evaluation walks operands left to right
// and numbers print via the engine's shortest round-trip rendering.

const NUM = 0;
const ESN = 1;
const MUL = 2;
const ADD = 3;

const UNKNOWN_TOKEN = "?";

export type EvidenceValue = string | null; // null marks "unknown"

export interface EvidenceVariable {
  name: string;
  values: string[];
}

export interface QueryBinding {
  variable: string;
  value: string;
  node: number;
}

export interface FlatQdag {
  evars: EvidenceVariable[];
  kinds: Uint8Array;
  numbers: Float64Array; // payload for NUM nodes
  esnVar: Int32Array; // payload for ESN nodes (index into evars)
  esnValue: Int32Array;
  operands: number[][]; // payload for MUL/ADD nodes
  queries: QueryBinding[];
}

export class ParseError extends Error {
  readonly line: number;

  constructor(line: number, message: string) {
    super(`line ${line}: ${message}`);
    this.line = line;
  }
}

export class UsageError extends Error {}

export function parseQdag(text: string): FlatQdag {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  let pos = 0;

  function next(): string {
    if (pos >= lines.length) {
      throw new ParseError(pos + 1, "unexpected end of document");
    }
    return lines[pos++];
  }

  function fail(message: string): never {
    throw new ParseError(pos, message);
  }

  function parseInt10(token: string): number {
    if (!/^-?\d+$/.test(token)) fail(`expected integer, found '${token}'`);
    return parseInt(token, 10);
  }

  function counted(keyword: string): number {
    const parts = next().split(" ");
    if (parts.length !== 2 || parts[0] !== keyword) {
      fail(`expected '${keyword} <count>'`);
    }
    return parseInt10(parts[1]);
  }

  if (next() !== "QDAG 1") throw new ParseError(1, "bad version, expected 'QDAG 1'");

  const evars: EvidenceVariable[] = [];
  const nEvars = counted("evars");
  for (let i = 0; i < nEvars; i++) {
    const parts = next().split(" ");
    if (parts.length < 3 || parts[0] !== "evar") {
      fail("expected 'evar <name> <k> <value...>'");
    }
    const k = parseInt10(parts[2]);
    const values = parts.slice(3);
    if (values.length !== k) fail(`declared ${k} values, found ${values.length}`);
    evars.push({ name: parts[1], values });
  }

  const nNodes = counted("nodes");
  const kinds = new Uint8Array(nNodes);
  const numbers = new Float64Array(nNodes);
  const esnVar = new Int32Array(nNodes);
  const esnValue = new Int32Array(nNodes);
  const operands: number[][] = new Array(nNodes);

  for (let nid = 0; nid < nNodes; nid++) {
    const parts = next().split(" ");
    const tag = parts[0];
    if (tag === "N" && parts.length === 2) {
      const value = Number(parts[1]);
      if (!Number.isFinite(value)) fail(`non-finite number '${parts[1]}'`);
      if (value < 0 || value > 1 + 1e-9) fail(`numeric payload ${parts[1]} outside [0, 1]`);
      kinds[nid] = NUM;
      numbers[nid] = value;
    } else if (tag === "E" && parts.length === 3) {
      const ei = parseInt10(parts[1]);
      const vi = parseInt10(parts[2]);
      if (ei < 0 || ei >= evars.length) fail(`evidence variable index ${ei} out of range`);
      if (vi < 0 || vi >= evars[ei].values.length) {
        fail(`value index ${vi} out of range for '${evars[ei].name}'`);
      }
      kinds[nid] = ESN;
      esnVar[nid] = ei;
      esnValue[nid] = vi;
    } else if ((tag === "M" || tag === "A") && parts.length >= 3) {
      const arity = parseInt10(parts[1]);
      const ids = parts.slice(2).map(parseInt10);
      if (ids.length !== arity) fail(`declared arity ${arity}, found ${ids.length} operands`);
      if (arity < 1) fail("operation node needs at least one operand");
      for (const id of ids) {
        if (id >= nid) fail(`forward reference to node ${id}`);
        if (id < 0) fail(`negative operand id ${id}`);
      }
      kinds[nid] = tag === "M" ? MUL : ADD;
      operands[nid] = ids;
    } else {
      fail(`malformed node line '${parts.join(" ")}'`);
    }
  }

  const queries: QueryBinding[] = [];
  const nQueries = counted("queries");
  for (let i = 0; i < nQueries; i++) {
    const parts = next().split(" ");
    if (parts.length !== 4 || parts[0] !== "Q") {
      fail("expected 'Q <variable> <value> <node-id>'");
    }
    const node = parseInt10(parts[3]);
    if (node < 0 || node >= nNodes) fail(`query references missing node ${node}`);
    queries.push({ variable: parts[1], value: parts[2], node });
  }

  if (pos !== lines.length) throw new ParseError(pos + 1, "trailing content");
  return { evars, kinds, numbers, esnVar, esnValue, operands, queries };
}

// Evidence is an array parallel to dag.evars: the observed value index,
// or -1 for unknown.
export function parseEvidenceArgs(dag: FlatQdag, args: string[]): Int32Array {
  const index = new Map<string, number>();
  dag.evars.forEach((v, i) => index.set(v.name, i));
  const evidence = new Int32Array(dag.evars.length).fill(-1);
  for (const arg of args) {
    const split = arg.indexOf("=");
    if (split <= 0 || split === arg.length - 1) {
      throw new UsageError(`bad evidence setting '${arg}', expected VAR=value`);
    }
    const name = arg.slice(0, split);
    const value = arg.slice(split + 1);
    const vi = index.get(name);
    if (vi === undefined) throw new UsageError(`unknown evidence variable '${name}'`);
    if (value === UNKNOWN_TOKEN) {
      evidence[vi] = -1;
      continue;
    }
    const pos = dag.evars[vi].values.indexOf(value);
    if (pos < 0) throw new UsageError(`'${value}' is not a value of '${name}'`);
    evidence[vi] = pos;
  }
  return evidence;
}

export function evaluate(dag: FlatQdag, evidence: Int32Array): Float64Array {
  const values = new Float64Array(dag.kinds.length);
  for (let nid = 0; nid < dag.kinds.length; nid++) {
    const kind = dag.kinds[nid];
    if (kind === NUM) {
      values[nid] = dag.numbers[nid];
    } else if (kind === ESN) {
      const observed = evidence[dag.esnVar[nid]];
      values[nid] = observed === -1 || observed === dag.esnValue[nid] ? 1 : 0;
    } else if (kind === MUL) {
      let v = 1;
      for (const o of dag.operands[nid]) v *= values[o];
      values[nid] = v;
    } else {
      let v = 0;
      for (const o of dag.operands[nid]) v += values[o];
      values[nid] = v;
    }
  }
  return values;
}

export function outputLines(dag: FlatQdag, values: Float64Array): string[] {
  return dag.queries.map(
    (q) => `${q.variable}=${q.value} ${String(values[q.node])}`,
  );
}
