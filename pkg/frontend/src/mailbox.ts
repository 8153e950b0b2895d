// Latest-wins mailbox between the network stream and the render loop: the
// reader is never blocked by a slow or stalled stream, and the renderer only
// ever sees the newest event.

import { StateEvent } from "./types.js";

export class EventMailbox {
  private latestEvent: StateEvent | null = null;
  private seenTick = -1;

  push(event: StateEvent): void {
    if (this.latestEvent === null || event.tick >= this.latestEvent.tick) {
      this.latestEvent = event;
    }
  }

  /** Newest event, or null before the first push. */
  peek(): StateEvent | null {
    return this.latestEvent;
  }

  /** Newest event if it is new since the last take, else null. */
  takeFresh(): StateEvent | null {
    if (this.latestEvent === null || this.latestEvent.tick <= this.seenTick) return null;
    this.seenTick = this.latestEvent.tick;
    return this.latestEvent;
  }
}

/** Split an NDJSON byte stream into parsed events pushed to the mailbox. */
export async function consumeStream(
  body: ReadableStream<Uint8Array>,
  mailbox: EventMailbox,
  onLine?: () => void,
): Promise<void> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  for (;;) {
    const { done, value } = await reader.read();
    if (done) return;
    buffer += decoder.decode(value, { stream: true });
    let newline = buffer.indexOf("\n");
    while (newline >= 0) {
      const line = buffer.slice(0, newline).trim();
      buffer = buffer.slice(newline + 1);
      if (line.length > 0) {
        mailbox.push(JSON.parse(line) as StateEvent);
        onLine?.();
      }
      newline = buffer.indexOf("\n");
    }
  }
}
