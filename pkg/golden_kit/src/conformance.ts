/**
 * Conformance checker for recorded sessions: given the request lines sent
 * and the raw response text received, validates framing (every response
 * is one JSON object per line), ordering (responses match requests in
 * order, cycle numbers echo back), and field presence (handshake ok,
 * outputs cover the declared ports).  Returns a list of violations;
 * empty means conformant.
 */

export interface RecordedSession {
  requests: string[];
  responseText: string;
}

export function checkConformance(session: RecordedSession): string[] {
  const problems: string[] = [];
  const responses: any[] = [];
  const lines = session.responseText.split("\n").filter((l) => l.trim());
  lines.forEach((line, i) => {
    try {
      const obj = JSON.parse(line);
      if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
        problems.push(`response line ${i + 1}: not a JSON object`);
      } else {
        responses.push(obj);
      }
    } catch {
      problems.push(`response line ${i + 1}: not JSON`);
    }
  });

  let outputPorts: string[] = [];
  let cursor = 0;
  for (const raw of session.requests) {
    let request: any;
    try {
      request = JSON.parse(raw);
    } catch {
      problems.push(`request not JSON: ${raw}`);
      continue;
    }
    if (request.type === "end") {
      break;
    }
    const response = responses[cursor++];
    if (response === undefined) {
      problems.push(`no response for request ${JSON.stringify(request.type)}`);
      continue;
    }
    if (response.type === "error") {
      continue; // an error reply is a legal (terminal) response
    }
    if (request.type === "init") {
      outputPorts = Object.keys(request.ports?.outputs ?? {});
      if (response.type !== "ok") {
        problems.push(`init answered with ${JSON.stringify(response.type)}`);
      }
    } else if (request.type === "cycle") {
      if (response.type !== "out") {
        problems.push(
          `cycle ${request.n} answered with ${JSON.stringify(response.type)}`,
        );
        continue;
      }
      if (response.n !== request.n) {
        problems.push(`cycle ${request.n} answered out of order (n=${response.n})`);
      }
      if (typeof response.outputs !== "object" || response.outputs === null) {
        problems.push(`cycle ${request.n} missing outputs`);
        continue;
      }
      for (const port of outputPorts) {
        if (!(port in response.outputs)) {
          problems.push(`cycle ${request.n} missing output field '${port}'`);
        }
      }
      if ("tags" in response && !Array.isArray(response.tags)) {
        problems.push(`cycle ${request.n} tags is not a list`);
      }
    }
  }
  if (cursor < responses.length) {
    problems.push(`${responses.length - cursor} unsolicited response(s)`);
  }
  return problems;
}
