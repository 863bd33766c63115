// Word-level diff via longest common subsequence; used only for display.
// Model-derived change magnitude always comes from the service's cosine
// distance, never from this.

export type DiffOp = "equal" | "insert" | "delete";

export interface DiffSpan {
  op: DiffOp;
  text: string;
}

function tokenize(text: string): string[] {
  return text.split(/\s+/).filter((w) => w.length > 0);
}

export function wordDiff(before: string, after: string): DiffSpan[] {
  const a = tokenize(before);
  const b = tokenize(after);
  const n = a.length;
  const m = b.length;
  // LCS length table
  const lcs: number[][] = Array.from({ length: n + 1 }, () => new Array<number>(m + 1).fill(0));
  for (let i = n - 1; i >= 0; i--) {
    for (let j = m - 1; j >= 0; j--) {
      lcs[i]![j] = a[i] === b[j]
        ? lcs[i + 1]![j + 1]! + 1
        : Math.max(lcs[i + 1]![j]!, lcs[i]![j + 1]!);
    }
  }
  const spans: DiffSpan[] = [];
  const push = (op: DiffOp, word: string) => {
    const prev = spans[spans.length - 1];
    if (prev && prev.op === op) {
      prev.text += ` ${word}`;
    } else {
      spans.push({ op, text: word });
    }
  };
  let i = 0;
  let j = 0;
  while (i < n && j < m) {
    if (a[i] === b[j]) {
      push("equal", a[i]!);
      i++;
      j++;
    } else if (lcs[i + 1]![j]! >= lcs[i]![j + 1]!) {
      push("delete", a[i]!);
      i++;
    } else {
      push("insert", b[j]!);
      j++;
    }
  }
  for (; i < n; i++) push("delete", a[i]!);
  for (; j < m; j++) push("insert", b[j]!);
  return spans;
}

export function isEmptyDiff(spans: DiffSpan[]): boolean {
  return spans.every((s) => s.op === "equal");
}
