// Directive presentation: speak through the browser speech facility when
// one exists, and report how long the utterance actually took.  The
// response timer starts when presentation starts, so the caller gets the
// start timestamp back immediately.

export interface Presentation {
  startedAt: number;
  finished: Promise<{ speechDurationMs: number }>;
}

interface SpeechFacility {
  cancel(): void;
  speak(u: SpeechSynthesisUtterance): void;
}

function facility(): SpeechFacility | null {
  if (typeof window === "undefined") return null;
  const synth = (window as any).speechSynthesis;
  return synth && typeof SpeechSynthesisUtterance !== "undefined" ? synth : null;
}

export function presentDirective(text: string, display?: (t: string) => void): Presentation {
  const startedAt = Date.now();
  if (display) display(text);
  const synth = facility();
  if (!synth) {
    // Text-only presentation: duration 0 by contract.
    return { startedAt, finished: Promise.resolve({ speechDurationMs: 0 }) };
  }
  const finished = new Promise<{ speechDurationMs: number }>((resolve) => {
    const utterance = new SpeechSynthesisUtterance(text);
    const done = () => resolve({ speechDurationMs: Date.now() - startedAt });
    utterance.onend = done;
    utterance.onerror = done;
    try {
      synth.cancel();
      synth.speak(utterance);
    } catch {
      resolve({ speechDurationMs: 0 });
    }
  });
  return { startedAt, finished };
}
