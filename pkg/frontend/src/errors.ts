/** Error raised when the native library rejects a request. */
export class IvpSuiteError extends Error {
  /** Error taxonomy code from the library, e.g. "ValidationError". */
  readonly code: string;

  constructor(code: string, message: string) {
    super(message);
    this.name = "IvpSuiteError";
    this.code = code;
  }
}

export class SessionClosedError extends Error {
  constructor(message = "session is closed") {
    super(message);
    this.name = "SessionClosedError";
  }
}
