import { afterEach, describe, expect, it, vi } from "vitest";
import { ApiClient, ApiError } from "../src/api";
import catalog from "./fixtures/catalog.json";
import createPrec from "./fixtures/create_prec.json";
import foilPrec from "./fixtures/foil_prec.json";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe("ApiClient", () => {
  it("fetches the map catalog", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(catalog));
    vi.stubGlobal("fetch", fetchMock);
    const got = await new ApiClient().maps();
    expect(fetchMock).toHaveBeenCalledWith("/maps", undefined);
    expect(got).toEqual(catalog);
  });

  it("posts session creation with only the provided fields", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(createPrec, 201));
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient("http://example.test");
    const got = await client.createSession("sokoban_switch_prec", { seed: 0 });
    expect(got.session_id).toBe(createPrec.session_id);
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("http://example.test/sessions");
    expect(JSON.parse((init as RequestInit).body as string)).toEqual({
      map_id: "sokoban_switch_prec",
      seed: 0,
    });
  });

  it("returns the foil response body untouched", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(foilPrec));
    vi.stubGlobal("fetch", fetchMock);
    const got = await new ApiClient().submitFoil("abc", ["push-right", "push-right"]);
    expect(got).toEqual(foilPrec);
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("/sessions/abc/foils");
    expect(JSON.parse((init as RequestInit).body as string)).toEqual({
      actions: ["push-right", "push-right"],
    });
  });

  it("polls a 202 submission until the result is ready", async () => {
    const fetchMock = vi
      .fn()
      .mockResolvedValueOnce(jsonResponse({ v: 1, poll: "tok123" }, 202))
      .mockResolvedValueOnce(jsonResponse({ status: "pending" }, 202))
      .mockResolvedValueOnce(jsonResponse(foilPrec));
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient("", 1);
    const got = await client.submitFoil("abc", ["push-right"]);
    expect(got.rendered_text).toBe(foilPrec.rendered_text);
    expect(fetchMock.mock.calls[1][0]).toBe("/polls/tok123");
    expect(fetchMock.mock.calls[2][0]).toBe("/polls/tok123");
  });

  it("surfaces the server's structured rejection detail", async () => {
    const detail = { message: "unknown action mnemonic 'moonwalk'", token: "moonwalk" };
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse({ detail }, 422));
    vi.stubGlobal("fetch", fetchMock);
    const err = await new ApiClient()
      .submitFoil("abc", ["moonwalk"])
      .then(() => null)
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(422);
    expect((err as ApiError).message).toBe("unknown action mnemonic 'moonwalk'");
  });

  it("reports non-JSON failures by status", async () => {
    const fetchMock = vi.fn().mockResolvedValue(new Response("boom", { status: 500 }));
    vi.stubGlobal("fetch", fetchMock);
    const err = await new ApiClient()
      .getSession("abc")
      .then(() => null)
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).message).toBe("HTTP 500");
  });
});
