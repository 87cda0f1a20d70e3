// Split the served protocol text into blocks and anchor each block that
// assesses a claim, so the panel can link straight to a claim's verdict.

const CLAIM_RE = /the (?:central )?claim '\[([^\]]+)\]:/;

export interface ProtocolBlock {
  text: string;
  anchor: string | null; // stable per-claim anchor id, first mention wins
  label: string | null;
}

export function slugify(label: string): string {
  return (
    "claim-" +
    label
      .toLowerCase()
      .replace(/[^a-z0-9]+/g, "-")
      .replace(/^-+|-+$/g, "")
  );
}

export function splitProtocol(text: string): ProtocolBlock[] {
  const seen = new Set<string>();
  return text
    .split(/\n\n+/)
    .map((raw) => raw.trimEnd())
    .filter((block) => block.length > 0)
    .map((block) => {
      const match = CLAIM_RE.exec(block);
      if (!match || !match[1]) {
        return { text: block, anchor: null, label: null };
      }
      const label = match[1];
      const base = slugify(label);
      let anchor = base;
      let n = 2;
      while (seen.has(anchor)) {
        anchor = `${base}-${n}`;
        n += 1;
      }
      seen.add(anchor);
      return { text: block, anchor, label };
    });
}

export function claimIndex(blocks: ProtocolBlock[]): { label: string; anchor: string }[] {
  return blocks
    .filter((b): b is ProtocolBlock & { anchor: string; label: string } => b.anchor !== null)
    .map((b) => ({ label: b.label, anchor: b.anchor }));
}
