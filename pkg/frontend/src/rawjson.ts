// Verbatim number extraction. Totals must be shown exactly as the server
// serialized them, and parse/re-stringify can change the spelling (1e-07
// becomes 1e-7, huge integers gain exponents), so this scanner slices the
// original literals out of the response text instead.

export interface RawInterval {
  low: string;
  mid: string;
  high: string;
}

type PrimitiveSink = (path: readonly string[], raw: string) => void;

const NUMBER_RE = /-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?/y;
const WS = new Set([" ", "\t", "\n", "\r"]);

class Scanner {
  pos = 0;
  readonly path: string[] = [];

  constructor(
    readonly text: string,
    readonly sink: PrimitiveSink,
  ) {}

  fail(what: string): never {
    throw new SyntaxError(`bad JSON at offset ${this.pos}: ${what}`);
  }

  skipWs(): void {
    while (this.pos < this.text.length && WS.has(this.text[this.pos])) this.pos++;
  }

  peek(): string {
    if (this.pos >= this.text.length) this.fail("unexpected end of input");
    return this.text[this.pos];
  }

  expect(ch: string): void {
    if (this.peek() !== ch) this.fail(`expected ${JSON.stringify(ch)}`);
    this.pos++;
  }

  value(): void {
    this.skipWs();
    const ch = this.peek();
    if (ch === "{") this.object();
    else if (ch === "[") this.array();
    else if (ch === '"') this.emit(this.string());
    else if (ch === "-" || (ch >= "0" && ch <= "9")) this.number();
    else if (this.text.startsWith("true", this.pos)) this.literal("true");
    else if (this.text.startsWith("false", this.pos)) this.literal("false");
    else if (this.text.startsWith("null", this.pos)) this.literal("null");
    else this.fail(`unexpected character ${JSON.stringify(ch)}`);
  }

  private emit(raw: string): void {
    this.sink(this.path, raw);
  }

  private literal(word: string): void {
    this.pos += word.length;
    this.emit(word);
  }

  private number(): void {
    NUMBER_RE.lastIndex = this.pos;
    const m = NUMBER_RE.exec(this.text);
    if (!m || m.index !== this.pos) this.fail("malformed number");
    this.pos += m[0].length;
    this.emit(m[0]);
  }

  /** Consumes a string token and returns its RAW text including quotes. */
  private string(): string {
    const start = this.pos;
    this.expect('"');
    while (true) {
      const ch = this.peek();
      this.pos++;
      if (ch === "\\") this.pos++;
      else if (ch === '"') break;
    }
    return this.text.slice(start, this.pos);
  }

  private object(): void {
    this.expect("{");
    this.skipWs();
    if (this.peek() === "}") {
      this.pos++;
      return;
    }
    while (true) {
      this.skipWs();
      const rawKey = this.string();
      const key: string = JSON.parse(rawKey);
      this.skipWs();
      this.expect(":");
      this.path.push(key);
      this.value();
      this.path.pop();
      this.skipWs();
      const ch = this.peek();
      this.pos++;
      if (ch === "}") return;
      if (ch !== ",") this.fail("expected ',' or '}'");
    }
  }

  private array(): void {
    this.expect("[");
    this.skipWs();
    if (this.peek() === "]") {
      this.pos++;
      return;
    }
    let i = 0;
    while (true) {
      this.path.push(String(i++));
      this.value();
      this.path.pop();
      this.skipWs();
      const ch = this.peek();
      this.pos++;
      if (ch === "]") return;
      if (ch !== ",") this.fail("expected ',' or ']'");
    }
  }
}

/** Walks JSON text, reporting every primitive with its path and raw slice. */
export function scanJson(text: string, sink: PrimitiveSink): void {
  const scanner = new Scanner(text, sink);
  scanner.value();
  scanner.skipWs();
  if (scanner.pos !== text.length) scanner.fail("trailing content");
}

const BOUNDS = ["low", "mid", "high"] as const;

/**
 * Raw low/mid/high literals for every quantity under "totals", exactly as
 * they appear in the response bytes.
 */
export function extractRawTotals(text: string): Record<string, RawInterval> {
  const found: Record<string, Partial<RawInterval>> = {};
  scanJson(text, (path, raw) => {
    if (path.length === 3 && path[0] === "totals") {
      const bound = path[2] as (typeof BOUNDS)[number];
      if ((BOUNDS as readonly string[]).includes(bound)) {
        (found[path[1]] ??= {})[bound] = raw;
      }
    }
  });
  const totals: Record<string, RawInterval> = {};
  for (const [quantity, bounds] of Object.entries(found)) {
    for (const b of BOUNDS) {
      if (bounds[b] === undefined) {
        throw new Error(`totals.${quantity} is missing ${b}`);
      }
    }
    totals[quantity] = bounds as RawInterval;
  }
  if (Object.keys(totals).length === 0) {
    throw new Error("document has no totals");
  }
  return totals;
}
