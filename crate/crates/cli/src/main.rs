fn main() {
    std::process::exit(rydyn_cli::run(std::env::args_os()));
}
