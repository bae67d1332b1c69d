import versionsFixture from "./fixtures/versions.json";
import versionsPromotedFixture from "./fixtures/versions_promoted.json";
import promoteResponseFixture from "./fixtures/promote_response.json";
import worldFixture from "./fixtures/world.json";
import scoresFixture from "./fixtures/scores.json";
import queryResultFixture from "./fixtures/query_result.json";
import type {
  QueryResult,
  ScoreTrajectory,
  VersionListing,
  WorldPayload,
} from "../src/types";

export const VERSIONS = versionsFixture as unknown as VersionListing;
export const VERSIONS_PROMOTED =
  versionsPromotedFixture as unknown as VersionListing;
export const PROMOTE_RESPONSE = promoteResponseFixture as unknown as {
  version: { id: string };
};
export const WORLD = worldFixture as unknown as WorldPayload;
export const SCORES = scoresFixture as unknown as ScoreTrajectory;
export const QUERY_RESULT = queryResultFixture as unknown as QueryResult;

function json(payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status: 200,
    headers: { "content-type": "application/json" },
  });
}

/**
 * fetch stand-in serving the recorded API fixtures. Promoting flips the
 * subsequent /versions listing to the post-promotion recording, mirroring
 * what the live service did when the fixtures were captured.
 */
export function makeFetchStub() {
  const calls: { url: string; method: string }[] = [];
  let promoted = false;

  const stub = async (
    input: RequestInfo | URL,
    init?: RequestInit,
  ): Promise<Response> => {
    const url = String(input);
    const method = init?.method ?? "GET";
    calls.push({ url, method });

    if (url.includes("/versions/diff")) return json({ nodes_changed: {} });
    if (url.endsWith("/promote")) {
      promoted = true;
      return json(PROMOTE_RESPONSE);
    }
    if (url.endsWith("/versions")) {
      return json(promoted ? VERSIONS_PROMOTED : VERSIONS);
    }
    if (url.includes("/worlds/")) return json(WORLD);
    if (url.includes("/scores")) return json(SCORES);
    if (url.includes("/query")) return json(QUERY_RESULT);
    return new Response("not found", { status: 404 });
  };

  return { stub: stub as typeof fetch, calls };
}
