import { bootstrap } from "./app.js";

bootstrap(document);
(document.getElementById("query") as HTMLInputElement).focus();
