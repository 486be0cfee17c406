// Portal instance configuration: one API base URL and that org's token.

export interface PortalConfig {
  baseUrl: string;
  token: string;
  pollIntervalMs: number;
}

const DEFAULT_POLL_MS = 2000;

/** Read config from query parameters, falling back to sensible defaults. */
export function configFromLocation(loc: Location): PortalConfig {
  const params = new URLSearchParams(loc.search);
  return {
    baseUrl: params.get("api") ?? loc.origin,
    token: params.get("token") ?? "",
    pollIntervalMs: Number(params.get("poll") ?? DEFAULT_POLL_MS),
  };
}
