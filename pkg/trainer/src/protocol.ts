/** Newline-delimited JSON client for the environment server.
 *
 * One request in flight at a time per connection:
 *   {"type":"reset","seed":s} -> {"type":"obs","vector":[...],"done":b}
 *   {"type":"act","index":i}  -> {"type":"step","reward":r,"vector":[...],"done":b}
 *   {"type":"close"}
 */

import { ChildProcess, spawn } from "node:child_process";
import { createInterface, Interface } from "node:readline";
import { createConnection, Socket } from "node:net";

export interface ObsReply {
  vector: number[];
  done: boolean;
}

export interface StepReply extends ObsReply {
  reward: number;
}

type Reply = Record<string, unknown>;

export class ProtocolViolation extends Error {}

abstract class NdjsonClient {
  private pending: { resolve: (r: Reply) => void; reject: (e: Error) => void } | null = null;
  protected reader!: Interface;

  protected attach(stream: NodeJS.ReadableStream): void {
    this.reader = createInterface({ input: stream });
    this.reader.on("line", (line) => {
      if (!this.pending) return;
      const slot = this.pending;
      this.pending = null;
      try {
        slot.resolve(JSON.parse(line) as Reply);
      } catch (err) {
        slot.reject(err as Error);
      }
    });
  }

  protected abstract write(line: string): void;

  private request(msg: Record<string, unknown>): Promise<Reply> {
    if (this.pending) throw new ProtocolViolation("one request in flight at a time");
    return new Promise((resolve, reject) => {
      this.pending = { resolve, reject };
      this.write(JSON.stringify(msg) + "\n");
    });
  }

  async reset(seed: number): Promise<ObsReply> {
    const reply = await this.request({ type: "reset", seed });
    if (reply.type !== "obs") throw new ProtocolViolation(`expected obs, got ${JSON.stringify(reply)}`);
    return { vector: reply.vector as number[], done: Boolean(reply.done) };
  }

  async act(index: number): Promise<StepReply> {
    const reply = await this.request({ type: "act", index });
    if (reply.type !== "step") throw new ProtocolViolation(`expected step, got ${JSON.stringify(reply)}`);
    return {
      reward: reply.reward as number,
      vector: reply.vector as number[],
      done: Boolean(reply.done),
    };
  }

  close(): void {
    try {
      this.write(JSON.stringify({ type: "close" }) + "\n");
    } catch {
      // already gone; nothing to clean up
    }
  }
}

/** Spawns the simulator as a child process and speaks over its stdio. */
export class StdioEnvClient extends NdjsonClient {
  private child: ChildProcess;

  constructor(command: string[], public readonly scenario: string) {
    super();
    this.child = spawn(command[0], command.slice(1), {
      stdio: ["pipe", "pipe", "inherit"],
    });
    this.attach(this.child.stdout!);
  }

  protected write(line: string): void {
    this.child.stdin!.write(line);
  }

  close(): void {
    super.close();
    this.child.stdin!.end();
  }
}

/** Connects to a simulator already serving on host:port. */
export class TcpEnvClient extends NdjsonClient {
  private socket: Socket;

  constructor(host: string, port: number) {
    super();
    this.socket = createConnection(port, host);
    this.attach(this.socket);
  }

  protected write(line: string): void {
    this.socket.write(line);
  }

  close(): void {
    super.close();
    this.socket.end();
  }
}

export function spawnSimulator(scenario: string): StdioEnvClient {
  return new StdioEnvClient(
    ["python3", "-m", "vfogsim.cli", "--config", scenario, "--serve", "stdio"],
    scenario,
  );
}
