// Browser bootstrap: read config from the URL and mount the portal.

import { Portal } from "./app.js";
import { configFromLocation } from "./config.js";

const root = document.getElementById("portal");
if (root === null) {
  throw new Error("missing #portal mount point");
}
const portal = new Portal(root, configFromLocation(window.location));
void portal.start();
